#include "survsplit/results_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

#include "survsplit/error.hpp"

namespace survsplit {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + msg);
}

double parse_number(std::string_view field, std::size_t line_no, const char* name) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    parse_error(line_no, std::string("cannot parse ") + name + " value '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) parse_error(line_no, std::string(name) + " is not finite");
  return v;
}

// Optional numeric cells are written empty.
std::string opt_cell(const std::optional<double>& a) {
  return a ? format_double(*a) : std::string{};
}

ordered_json opt_json(const std::optional<double>& a) {
  return a ? ordered_json(*a) : ordered_json(nullptr);
}

ordered_json num_json(double x) {
  return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

std::string_view status_name(RecordStatus s) {
  return s == RecordStatus::Ok ? "ok" : "no_cut";
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  Dataset data;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (!have_header) {
      if (body.empty()) parse_error(line_no, "expected header 'time,event,z'");
      const auto cols = split_fields(body);
      if (cols.size() != 3 || cols[0] != "time" || cols[1] != "event" || cols[2] != "z") {
        parse_error(line_no, "expected header 'time,event,z', got '" + std::string(body) + "'");
      }
      have_header = true;
      continue;
    }
    if (body.empty()) continue;
    const auto cols = split_fields(body);
    if (cols.size() != 3) {
      parse_error(line_no, "expected 3 fields, got " + std::to_string(cols.size()));
    }
    Subject s;
    s.time = parse_number(cols[0], line_no, "time");
    if (s.time < 0.0) parse_error(line_no, "time must be nonnegative");
    if (cols[1] == "1") {
      s.event = true;
    } else if (cols[1] == "0") {
      s.event = false;
    } else {
      parse_error(line_no, "event must be 0 or 1, got '" + std::string(cols[1]) + "'");
    }
    s.z = parse_number(cols[2], line_no, "z");
    data.push_back(s);
  }
  if (!have_header) parse_error(1, "empty file");
  if (data.empty()) parse_error(line_no + 1, "no data rows");
  return data;
}

Dataset read_dataset_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, std::span<const Subject> data) {
  out << "time,event,z\n";
  for (const auto& s : data) {
    out << format_double(s.time) << ',' << (s.event ? 1 : 0) << ',' << format_double(s.z) << '\n';
  }
}

void write_records_csv(std::ostream& out, std::span<const ReplicateRecord> records,
                       bool with_checksum) {
  out << "method,n,a,rep,c_hat,stat,status,runtime_us";
  if (with_checksum) out << ",data_checksum";
  out << '\n';
  for (const auto& r : records) {
    const bool ok = r.status == RecordStatus::Ok;
    out << to_string(r.method) << ',' << r.n << ',' << opt_cell(r.a) << ',' << r.rep << ','
        << (ok ? format_double(r.c_hat) : "") << ',' << (ok ? format_double(r.stat) : "") << ','
        << status_name(r.status) << ',' << r.runtime_us;
    if (with_checksum) out << ',' << r.data_checksum;
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const EcpSummary> summaries) {
  out << "method,n,a,edge_eps,edge_fraction,median_c,iqr_c\n";
  for (const auto& s : summaries) {
    out << to_string(s.method) << ',' << s.n << ',' << opt_cell(s.a) << ','
        << format_double(s.edge_eps) << ',' << format_double(s.edge_fraction) << ','
        << format_double(s.median_c) << ',' << format_double(s.iqr_c) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, std::span<const EcpSummary> summaries) {
  out << "method,n,a,bin_lo,bin_hi,count\n";
  for (const auto& s : summaries) {
    for (int b = 0; b < kHistogramBins; ++b) {
      out << to_string(s.method) << ',' << s.n << ',' << opt_cell(s.a) << ','
          << format_double(static_cast<double>(b) / kHistogramBins) << ','
          << format_double(static_cast<double>(b + 1) / kHistogramBins) << ','
          << s.histogram[static_cast<std::size_t>(b)] << '\n';
    }
  }
}

void write_variance_csv(std::ostream& out, std::span<const VarianceRow> rows) {
  out << "n,c,method,a,var_q,se_var,reps\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.c) << ',' << to_string(r.method) << ',' << opt_cell(r.a)
        << ',' << format_double(r.var_q) << ',' << format_double(r.se_var) << ',' << r.reps << '\n';
  }
}

ordered_json records_json(std::span<const ReplicateRecord> records, bool with_checksum) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : records) {
    ordered_json j;
    j["method"] = to_string(r.method);
    j["n"] = r.n;
    j["a"] = opt_json(r.a);
    j["rep"] = r.rep;
    j["c_hat"] = num_json(r.c_hat);
    j["stat"] = num_json(r.stat);
    j["status"] = status_name(r.status);
    j["runtime_us"] = r.runtime_us;
    if (with_checksum) j["data_checksum"] = r.data_checksum;
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json summary_json(std::span<const EcpSummary> summaries) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : summaries) {
    ordered_json j;
    j["method"] = to_string(s.method);
    j["n"] = s.n;
    j["a"] = opt_json(s.a);
    j["edge_eps"] = s.edge_eps;
    j["edge_fraction"] = s.edge_fraction;
    j["median_c"] = s.median_c;
    j["iqr_c"] = s.iqr_c;
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json histogram_json(std::span<const EcpSummary> summaries) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : summaries) {
    for (int b = 0; b < kHistogramBins; ++b) {
      ordered_json j;
      j["method"] = to_string(s.method);
      j["n"] = s.n;
      j["a"] = opt_json(s.a);
      j["bin_lo"] = static_cast<double>(b) / kHistogramBins;
      j["bin_hi"] = static_cast<double>(b + 1) / kHistogramBins;
      j["count"] = s.histogram[static_cast<std::size_t>(b)];
      arr.push_back(std::move(j));
    }
  }
  return arr;
}

ordered_json variance_json(std::span<const VarianceRow> rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["n"] = r.n;
    j["c"] = r.c;
    j["method"] = to_string(r.method);
    j["a"] = opt_json(r.a);
    j["var_q"] = num_json(r.var_q);
    j["se_var"] = num_json(r.se_var);
    j["reps"] = r.reps;
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json config_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["n"] = cfg.n_list;
  j["reps"] = cfg.reps;
  j["beta0"] = cfg.beta0;
  j["beta1"] = cfg.beta1;
  j["c0"] = cfg.c0;
  j["a"] = cfg.a_fixed;
  j["a_adaptive"] = cfg.a_adaptive;
  j["seed"] = cfg.master_seed;
  j["edge_eps"] = cfg.edge_eps;
  j["min_child"] = cfg.min_child;
  j["grid_points"] = cfg.grid_points;
  j["timing"] = cfg.record_timing;
  j["checksum"] = cfg.record_checksum;
  return j;
}

ordered_json split_result_json(const SplitResult& r) {
  ordered_json j;
  j["method"] = to_string(r.method);
  j["c_hat"] = r.c_hat;
  j["stat"] = r.stat;
  j["a"] = opt_json(r.a);
  j["n_evaluations"] = r.n_evaluations;
  if (r.method == Method::GS) j["tie_break"] = "nearest_0.5_then_smaller_c";
  return j;
}

void write_files_atomically(const fs::path& dir,
                            std::span<const std::pair<std::string, std::string>> files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<fs::path> temps;
  auto cleanup = [&] {
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& [name, contents] : files) {
    const fs::path tmp = dir / ("." + name + ".tmp");
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << contents;
    out.close();
    if (!out) {
      cleanup();
      throw Error(ErrorCode::Io, "failed writing " + tmp.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(temps[i], dir / files[i].first, ec);
    if (ec) {
      cleanup();
      throw Error(ErrorCode::Io, "failed renaming into " + (dir / files[i].first).string());
    }
  }
}

}  // namespace survsplit
