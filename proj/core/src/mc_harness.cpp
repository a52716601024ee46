#include "survsplit/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>

#include "survsplit/error.hpp"
#include "survsplit/risk_model.hpp"
#include "survsplit/sss_smooth.hpp"

namespace survsplit {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

// Sort key shared by records and summaries: GS first, then SSS by a, with
// the adaptive variant ahead of a fixed a of equal value.
auto group_key(const Method m, int n, const std::optional<double>& a, bool adaptive) {
  return std::make_tuple(m == Method::GS ? 0 : 1, n, a.value_or(0.0), adaptive ? 0 : 1);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!n_list.empty(), "n list must not be empty");
  for (int n : n_list) require(n >= 2, "every n must be >= 2");
  require(reps >= 1, "reps must be >= 1");
  require(edge_eps > 0.0 && edge_eps < 0.5, "edge_eps must lie in (0, 0.5)");
  for (double a : a_fixed) require(std::isfinite(a) && a >= 1.0, "every a must be >= 1");
  require(min_child >= 0, "min_child must be >= 0");
  require(grid_points >= 1, "grid_points must be >= 1");
  require(threads >= 0, "threads must be >= 0");
  require(c0 > 0.0 && c0 < 1.0, "c0 must lie in (0,1)");
  require(std::isfinite(beta0) && std::isfinite(beta1), "beta0 and beta1 must be finite");
}

ExperimentConfig ExperimentConfig::paper_null() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::paper_weak() {
  ExperimentConfig cfg;
  cfg.beta1 = -0.1;
  return cfg;
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  struct Variant {
    SigmoidParams params;
  };
  std::vector<Variant> sss_variants;
  if (cfg.a_adaptive) sss_variants.push_back({SigmoidParams{0.0, true}});
  for (double a : cfg.a_fixed) sss_variants.push_back({SigmoidParams{a, false}});
  const std::size_t per_rep = 1 + sss_variants.size();

  const HazardModel model{cfg.beta0, cfg.beta1, cfg.c0};
  const int reps = cfg.reps;
  const int items = static_cast<int>(cfg.n_list.size()) * reps;
  std::vector<ReplicateRecord> slots(static_cast<std::size_t>(items) * per_rep);

  SssOptions sss_opts;
  sss_opts.grid_points = cfg.grid_points;

  parallel_for(items, cfg.threads, [&](int item) {
    const int n = cfg.n_list[static_cast<std::size_t>(item / reps)];
    const int rep = item % reps;
    const Dataset data = generate_dataset(
        model, n, SeedSpec{cfg.master_seed, static_cast<std::uint64_t>(rep)});
    const std::uint64_t checksum = cfg.record_checksum ? dataset_checksum(data) : 0;
    ReplicateRecord* out = &slots[static_cast<std::size_t>(item) * per_rep];

    std::optional<RiskTable> rt;
    try {
      rt = RiskTable::build(data);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoEvents) throw;
    }

    auto run_one = [&](ReplicateRecord& rec, auto&& search) {
      rec.n = n;
      rec.rep = rep;
      rec.data_checksum = checksum;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (!rt) throw Error(ErrorCode::NoAdmissibleCut, "no events");
        const SplitResult r = search();
        rec.c_hat = r.c_hat;
        rec.stat = r.stat;
        if (r.a) rec.a = r.a;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoAdmissibleCut && e.code() != ErrorCode::ZeroScale) throw;
        rec.status = RecordStatus::NoCut;
        rec.c_hat = std::numeric_limits<double>::quiet_NaN();
        rec.stat = std::numeric_limits<double>::quiet_NaN();
      }
      if (cfg.record_timing) {
        rec.runtime_us = std::chrono::duration_cast<std::chrono::microseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      }
    };

    out[0].method = Method::GS;
    run_one(out[0], [&] { return greedy_search(*rt, data, cfg.min_child); });
    for (std::size_t v = 0; v < sss_variants.size(); ++v) {
      ReplicateRecord& rec = out[1 + v];
      rec.method = Method::SSS;
      rec.adaptive = sss_variants[v].params.adaptive;
      rec.a = resolve_a(sss_variants[v].params, static_cast<std::size_t>(n));
      run_one(rec, [&] { return sss_search(*rt, data, sss_variants[v].params, sss_opts); });
    }
  });

  ExperimentResult result;
  result.records = std::move(slots);
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const ReplicateRecord& x, const ReplicateRecord& y) {
                     return std::make_tuple(group_key(x.method, x.n, x.a, x.adaptive), x.rep) <
                            std::make_tuple(group_key(y.method, y.n, y.a, y.adaptive), y.rep);
                   });
  result.flagged = static_cast<int>(
      std::count_if(result.records.begin(), result.records.end(),
                    [](const ReplicateRecord& r) { return r.status != RecordStatus::Ok; }));
  if (result.flagged < static_cast<int>(result.records.size())) {
    result.summaries = summarize(result.records, cfg.edge_eps);
  }
  return result;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::EmptyGroup, "quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<EcpSummary> summarize(std::span<const ReplicateRecord> records, double edge_eps) {
  if (records.empty()) throw Error(ErrorCode::EmptyGroup, "summarize: no records");

  std::vector<const ReplicateRecord*> ok;
  for (const auto& r : records) {
    if (r.status == RecordStatus::Ok) ok.push_back(&r);
  }
  if (ok.empty()) throw Error(ErrorCode::EmptyGroup, "summarize: every record is flagged");
  std::stable_sort(ok.begin(), ok.end(), [](const ReplicateRecord* x, const ReplicateRecord* y) {
    return group_key(x->method, x->n, x->a, x->adaptive) <
           group_key(y->method, y->n, y->a, y->adaptive);
  });

  std::vector<EcpSummary> out;
  std::size_t i = 0;
  while (i < ok.size()) {
    const auto key = group_key(ok[i]->method, ok[i]->n, ok[i]->a, ok[i]->adaptive);
    std::size_t j = i;
    std::vector<double> cs;
    while (j < ok.size() && group_key(ok[j]->method, ok[j]->n, ok[j]->a, ok[j]->adaptive) == key) {
      cs.push_back(ok[j]->c_hat);
      ++j;
    }
    EcpSummary s;
    s.method = ok[i]->method;
    s.n = ok[i]->n;
    s.a = ok[i]->a;
    s.adaptive = ok[i]->adaptive;
    s.edge_eps = edge_eps;
    s.count = static_cast<int>(cs.size());
    int edge = 0;
    for (double c : cs) {
      if (std::min(c, 1.0 - c) < edge_eps) ++edge;
      const int bin = std::clamp(static_cast<int>(std::floor(c * kHistogramBins)), 0,
                                 kHistogramBins - 1);
      ++s.histogram[static_cast<std::size_t>(bin)];
    }
    s.edge_fraction = static_cast<double>(edge) / static_cast<double>(cs.size());
    std::sort(cs.begin(), cs.end());
    s.median_c = quantile_sorted(cs, 0.5);
    s.iqr_c = quantile_sorted(cs, 0.75) - quantile_sorted(cs, 0.25);
    out.push_back(s);
    i = j;
  }
  return out;
}

void VarianceProbeConfig::validate() const {
  require(n >= 2, "n must be >= 2");
  require(reps >= 1, "reps must be >= 1");
  require(!c_grid.empty(), "c grid must not be empty");
  for (double c : c_grid) require(c > 0.0 && c < 1.0, "every c must lie in (0,1)");
  for (double a : a_list) require(std::isfinite(a) && a > 0.0, "every a must be positive");
  require(threads >= 0, "threads must be >= 0");
}

std::vector<VarianceRow> variance_probe(const VarianceProbeConfig& cfg) {
  cfg.validate();
  const HazardModel null_model{cfg.beta0, 0.0, 0.5};
  const std::size_t num_c = cfg.c_grid.size();
  const std::size_t per_c = 1 + cfg.a_list.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // values[rep][c][slot]; NaN marks a non-computable statistic.
  std::vector<double> values(static_cast<std::size_t>(cfg.reps) * num_c * per_c, nan);
  parallel_for(cfg.reps, cfg.threads, [&](int rep) {
    const Dataset data = generate_dataset(null_model, cfg.n,
                                          SeedSpec{cfg.master_seed, static_cast<std::uint64_t>(rep)});
    RiskTable rt;
    try {
      rt = RiskTable::build(data);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoEvents) throw;
      return;
    }
    double* row = &values[static_cast<std::size_t>(rep) * num_c * per_c];
    for (std::size_t ci = 0; ci < num_c; ++ci) {
      const double c = cfg.c_grid[ci];
      if (auto h = try_hard_stat(rt, data, c)) row[ci * per_c] = h->q;
      for (std::size_t ai = 0; ai < cfg.a_list.size(); ++ai) {
        if (auto s = try_soft_stat(rt, data, c, cfg.a_list[ai])) row[ci * per_c + 1 + ai] = s->q;
      }
    }
  });

  std::vector<VarianceRow> rows;
  for (std::size_t ci = 0; ci < num_c; ++ci) {
    for (std::size_t slot = 0; slot < per_c; ++slot) {
      std::vector<double> xs;
      xs.reserve(static_cast<std::size_t>(cfg.reps));
      for (int rep = 0; rep < cfg.reps; ++rep) {
        const double v = values[(static_cast<std::size_t>(rep) * num_c + ci) * per_c + slot];
        if (!std::isnan(v)) xs.push_back(v);
      }
      VarianceRow row;
      row.n = cfg.n;
      row.c = cfg.c_grid[ci];
      row.method = slot == 0 ? Method::GS : Method::SSS;
      if (slot > 0) row.a = cfg.a_list[slot - 1];
      row.reps = static_cast<int>(xs.size());
      row.var_q = nan;
      row.se_var = nan;
      const double r = static_cast<double>(xs.size());
      if (xs.size() >= 2) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= r;
        double m2 = 0.0;
        double m4 = 0.0;
        for (double x : xs) {
          const double d2 = (x - mean) * (x - mean);
          m2 += d2;
          m4 += d2 * d2;
        }
        row.var_q = m2 / (r - 1.0);
        // Var(s^2) ~ (mu4 - (r-3)/(r-1) sigma^4) / r; needs a few replicates.
        if (xs.size() >= 4) {
          const double mu4 = m4 / r;
          const double v = (mu4 - (r - 3.0) / (r - 1.0) * row.var_q * row.var_q) / r;
          row.se_var = std::sqrt(std::max(v, 0.0));
          row.se_finite = true;
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace survsplit
