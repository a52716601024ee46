#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "survsplit/datagen.hpp"
#include "survsplit/error.hpp"
#include "survsplit/logrank_hard.hpp"
#include "survsplit/mc_harness.hpp"
#include "survsplit/results_io.hpp"
#include "survsplit/sss_smooth.hpp"

#ifndef SURVSPLIT_VERSION
#define SURVSPLIT_VERSION "unknown"
#endif

namespace survsplit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using FileList = std::vector<std::pair<std::string, std::string>>;

struct SplitArgs {
  std::string input;
  std::string method = "gs";
  double a = 50.0;
  bool a_adaptive = false;
  int min_child = 0;
  int grid_points = 1024;
};

struct SimulateArgs {
  std::string preset = "paper-null";
  ExperimentConfig cfg = ExperimentConfig::paper_null();
  std::string out_dir = "survsplit-out";
  std::string format = "csv";
  bool dump_data = false;
};

struct ProbeArgs {
  VarianceProbeConfig cfg;
  std::string out_dir = "survsplit-out";
  std::string format = "csv";
};

struct MomentsArgs {
  std::vector<double> a_list{1, 10, 50, 100, 1000};
  std::vector<double> c_grid;
  std::string out;
};

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

template <class F>
std::string to_text(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

int cmd_split(const SplitArgs& args, std::ostream& out) {
  Dataset data = read_dataset_csv(fs::path(args.input));
  const bool normalized = normalize_covariate(data);
  const RiskTable rt = RiskTable::build(data);
  SplitResult r;
  if (args.method == "gs") {
    r = greedy_search(rt, data, args.min_child);
  } else {
    SssOptions opts;
    opts.grid_points = args.grid_points;
    r = sss_search(rt, data, SigmoidParams{args.a, args.a_adaptive}, opts);
  }
  ordered_json j = split_result_json(r);
  j["n"] = data.size();
  j["covariate_rank_transformed"] = normalized;
  out << json_text(j);
  return kExitOk;
}

int cmd_simulate(SimulateArgs args, const std::vector<std::string>& overridden, std::ostream& out) {
  ExperimentConfig& cfg = args.cfg;
  const ExperimentResult res = run_experiment(cfg);
  const bool json = args.format == "json";

  FileList files;
  if (json) {
    files.emplace_back("records.json", json_text(records_json(res.records, cfg.record_checksum)));
    files.emplace_back("summary.json", json_text(summary_json(res.summaries)));
    files.emplace_back("histogram.json", json_text(histogram_json(res.summaries)));
  } else {
    files.emplace_back("records.csv", to_text([&](std::ostream& os) {
                         write_records_csv(os, res.records, cfg.record_checksum);
                       }));
    files.emplace_back("summary.csv",
                       to_text([&](std::ostream& os) { write_summary_csv(os, res.summaries); }));
    files.emplace_back("histogram.csv",
                       to_text([&](std::ostream& os) { write_histogram_csv(os, res.summaries); }));
  }

  const fs::path dir(args.out_dir);
  if (args.dump_data) {
    const HazardModel model{cfg.beta0, cfg.beta1, cfg.c0};
    for (int n : cfg.n_list) {
      for (int rep = 0; rep < cfg.reps; ++rep) {
        const Dataset d =
            generate_dataset(model, n, SeedSpec{cfg.master_seed, static_cast<std::uint64_t>(rep)});
        files.emplace_back("data_n" + std::to_string(n) + "_rep" + std::to_string(rep) + ".csv",
                           to_text([&](std::ostream& os) { write_dataset_csv(os, d); }));
      }
    }
  }

  ordered_json manifest;
  manifest["command"] = "simulate";
  manifest["version"] = SURVSPLIT_VERSION;
  manifest["preset"] = args.preset;
  manifest["seed"] = cfg.master_seed;
  manifest["config"] = config_json(cfg);
  manifest["overridden"] = overridden;
  manifest["format"] = args.format;
  manifest["flagged_replicates"] = res.flagged;
  manifest["gs_tie_break"] = "nearest_0.5_then_smaller_c";
  ordered_json names = ordered_json::array();
  for (const auto& f : files) names.push_back(f.first);
  manifest["files"] = names;
  files.emplace_back("manifest.json", json_text(manifest));

  write_files_atomically(dir, files);
  out << "wrote " << files.size() << " files to " << dir.string() << " (" << res.records.size()
      << " records, " << res.flagged << " flagged)\n";
  return kExitOk;
}

int cmd_variance_probe(const ProbeArgs& args, std::ostream& out) {
  const auto rows = variance_probe(args.cfg);
  FileList files;
  if (args.format == "json") {
    files.emplace_back("variance.json", json_text(variance_json(rows)));
  } else {
    files.emplace_back("variance.csv",
                       to_text([&](std::ostream& os) { write_variance_csv(os, rows); }));
  }
  ordered_json manifest;
  manifest["command"] = "variance-probe";
  manifest["version"] = SURVSPLIT_VERSION;
  manifest["seed"] = args.cfg.master_seed;
  manifest["n"] = args.cfg.n;
  manifest["reps"] = args.cfg.reps;
  manifest["beta0"] = args.cfg.beta0;
  manifest["beta1"] = 0.0;
  manifest["a"] = args.cfg.a_list;
  manifest["c"] = args.cfg.c_grid;
  files.emplace_back("manifest.json", json_text(manifest));
  write_files_atomically(fs::path(args.out_dir), files);
  out << "wrote " << files.size() << " files to " << args.out_dir << "\n";
  return kExitOk;
}

int cmd_moments(MomentsArgs args, std::ostream& out) {
  if (args.c_grid.empty()) {
    for (int i = 1; i <= 99; ++i) args.c_grid.push_back(i / 100.0);
  }
  for (double c : args.c_grid) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidArgument, "every --c must lie in [0,1]");
  }
  for (double a : args.a_list) {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "every --a must be positive");
  }
  const std::string text = to_text([&](std::ostream& os) {
    os << "c,a,b_a,psi_a,bound_slack\n";
    for (double a : args.a_list) {
      for (double c : args.c_grid) {
        const SigmoidMoments m = sigmoid_moments(c, a);
        const double slack = 2.0 * std::log(2.0) / a - std::abs(m.b_a - c);
        os << format_double(c) << ',' << format_double(a) << ',' << format_double(m.b_a) << ','
           << format_double(m.psi_a) << ',' << format_double(slack) << '\n';
      }
    }
  });
  if (args.out.empty()) {
    out << text;
  } else {
    const fs::path p(args.out);
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    write_files_atomically(dir, FileList{{p.filename().string(), text}});
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Survival split-point search: greedy logrank vs smooth sigmoid surrogate",
               "survsplit"};
  app.set_version_flag("--version", std::string(SURVSPLIT_VERSION));
  app.require_subcommand(1);
  app.get_formatter()->column_width(36);

  // split
  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Find the best cutpoint for a time,event,z CSV");
  split_cmd->add_option("input,--input", split.input, "Dataset CSV (time,event,z)")->required();
  split_cmd->add_option("--method", split.method, "gs or sss")
      ->check(CLI::IsMember({"gs", "sss"}))
      ->capture_default_str();
  split_cmd->add_option("--a", split.a, "Sigmoid shape for sss")->capture_default_str();
  split_cmd->add_flag("--a-adaptive", split.a_adaptive, "Use a = sqrt(n) for sss");
  split_cmd->add_option("--min-child", split.min_child, "Minimum subjects per child (gs)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  split_cmd->add_option("--grid-points", split.grid_points, "SSS scan grid size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // simulate
  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the end-cut preference experiment grid");
  ExperimentConfig& c = sim.cfg;
  std::vector<std::pair<std::string, CLI::Option*>> sim_opts;
  auto track = [&](const std::string& name, CLI::Option* o) {
    sim_opts.emplace_back(name, o);
    return o;
  };
  sim_cmd->add_option("--preset", sim.preset, "paper-null or paper-weak")
      ->check(CLI::IsMember({"paper-null", "paper-weak"}))
      ->capture_default_str();
  track("n", sim_cmd->add_option("--n", c.n_list, "Sample sizes (repeatable)")->capture_default_str());
  track("reps", sim_cmd->add_option("--reps", c.reps, "Replicates per n")->capture_default_str());
  track("beta0", sim_cmd->add_option("--beta0", c.beta0, "Baseline log-hazard")->capture_default_str());
  track("beta1", sim_cmd->add_option("--beta1", c.beta1, "Signal strength (preset decides)")
                     ->capture_default_str());
  track("c0", sim_cmd->add_option("--c0", c.c0, "True cutoff")->capture_default_str());
  track("a", sim_cmd->add_option("--a", c.a_fixed, "Fixed sigmoid shapes (repeatable)")
                 ->capture_default_str());
  track("a-adaptive", sim_cmd->add_flag("--a-adaptive,!--no-a-adaptive", c.a_adaptive,
                                        "Also run SSS with a = sqrt(n) (default on)"));
  track("seed", sim_cmd->add_option("--seed", c.master_seed, "Master seed")->capture_default_str());
  track("edge-eps", sim_cmd->add_option("--edge-eps", c.edge_eps, "Edge region half-width")
                        ->capture_default_str());
  track("min-child", sim_cmd->add_option("--min-child", c.min_child, "GS minimum child size")
                         ->capture_default_str());
  track("grid-points", sim_cmd->add_option("--grid-points", c.grid_points, "SSS scan grid size")
                           ->capture_default_str());
  track("threads", sim_cmd->add_option("--threads", c.threads, "Worker cap, 0 = auto")
                       ->capture_default_str());
  track("timing", sim_cmd->add_flag("--timing", c.record_timing,
                                    "Record wall-clock runtime_us (breaks byte reproducibility)"));
  track("checksum", sim_cmd->add_flag("--checksum", c.record_checksum,
                                      "Append a per-replicate dataset checksum column"));
  sim_cmd->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();
  sim_cmd->add_option("--format", sim.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sim_cmd->add_flag("--dump-data", sim.dump_data, "Also write every simulated dataset as CSV");

  // variance-probe
  ProbeArgs probe;
  auto* probe_cmd =
      app.add_subcommand("variance-probe", "Monte Carlo Var(q(c)) and Var(q_a(c)) under the null");
  probe_cmd->add_option("--n", probe.cfg.n, "Sample size")->capture_default_str();
  probe_cmd->add_option("--reps", probe.cfg.reps, "Replicates")->capture_default_str();
  probe_cmd->add_option("--beta0", probe.cfg.beta0, "Baseline log-hazard")->capture_default_str();
  probe_cmd->add_option("--a", probe.cfg.a_list, "Sigmoid shapes (repeatable)")->capture_default_str();
  probe_cmd->add_option("--c", probe.cfg.c_grid, "Cutpoints (repeatable)")->capture_default_str();
  probe_cmd->add_option("--seed", probe.cfg.master_seed, "Master seed")->capture_default_str();
  probe_cmd->add_option("--threads", probe.cfg.threads, "Worker cap, 0 = auto")->capture_default_str();
  probe_cmd->add_option("--out-dir", probe.out_dir, "Output directory")->capture_default_str();
  probe_cmd->add_option("--format", probe.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // moments
  MomentsArgs moments;
  auto* moments_cmd =
      app.add_subcommand("moments", "Closed-form mean/variance of the sigmoid weight under U(0,1)");
  moments_cmd->add_option("--a", moments.a_list, "Sigmoid shapes (repeatable)")->capture_default_str();
  moments_cmd->add_option("--c", moments.c_grid, "Cutpoints (repeatable; default 0.01..0.99)");
  moments_cmd->add_option("--out", moments.out, "Write CSV here instead of stdout");

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*split_cmd) return cmd_split(split, out);
    if (*sim_cmd) {
      // The preset fills every flag the user did not give explicitly.
      ExperimentConfig base =
          sim.preset == "paper-weak" ? ExperimentConfig::paper_weak() : ExperimentConfig::paper_null();
      std::vector<std::string> overridden;
      for (const auto& [name, opt] : sim_opts) {
        if (opt->count() > 0) overridden.push_back(name);
      }
      auto given = [&](const std::string& name) {
        return std::find(overridden.begin(), overridden.end(), name) != overridden.end();
      };
      if (!given("beta1")) c.beta1 = base.beta1;
      return cmd_simulate(sim, overridden, out);
    }
    if (*probe_cmd) return cmd_variance_probe(probe, out);
    if (*moments_cmd) return cmd_moments(moments, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::NoAdmissibleCut ? kExitNoCut : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace survsplit::cli
