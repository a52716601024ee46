#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "survsplit/datagen.hpp"
#include "survsplit/logrank_hard.hpp"

namespace survsplit {

inline constexpr int kHistogramBins = 50;

struct ExperimentConfig {
  std::vector<int> n_list{50, 100, 500, 1000};
  int reps = 500;
  double beta0 = 1.0;
  double beta1 = 0.0;
  double c0 = 0.5;
  std::vector<double> a_fixed{50, 60, 70, 80, 90, 100};
  bool a_adaptive = true;
  double edge_eps = 0.05;
  int min_child = 0;
  std::uint64_t master_seed = 20251015;
  int grid_points = 1024;
  int threads = 0;  // 0 = hardware concurrency
  // Wall-clock timing makes records.csv non-reproducible, so it is opt-in.
  bool record_timing = false;
  bool record_checksum = false;

  /// Throws InvalidArgument on a violated invariant.
  void validate() const;

  static ExperimentConfig paper_null();
  static ExperimentConfig paper_weak();
};

enum class RecordStatus { Ok, NoCut };

struct ReplicateRecord {
  Method method = Method::GS;
  int n = 0;
  std::optional<double> a;  // empty for GS
  bool adaptive = false;    // a was resolved as sqrt(n)
  int rep = 0;
  double c_hat = 0.0;
  double stat = 0.0;
  RecordStatus status = RecordStatus::Ok;
  std::int64_t runtime_us = 0;
  std::uint64_t data_checksum = 0;
};

struct EcpSummary {
  Method method = Method::GS;
  int n = 0;
  std::optional<double> a;
  bool adaptive = false;
  double edge_eps = 0.05;
  double edge_fraction = 0.0;
  double median_c = 0.0;
  double iqr_c = 0.0;
  int count = 0;
  std::array<int, kHistogramBins> histogram{};
};

struct ExperimentResult {
  std::vector<ReplicateRecord> records;
  std::vector<EcpSummary> summaries;
  int flagged = 0;
};

/// Runs GS and every SSS variant on each simulated dataset. Records come
/// back ordered by (method, n, a, rep) whatever the thread schedule.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Groups records by (method, n, a) and summarizes the ok rows of each
/// group. Throws EmptyGroup when there is nothing to summarize.
std::vector<EcpSummary> summarize(std::span<const ReplicateRecord> records, double edge_eps);

/// Linear-interpolation quantile of sorted data (type 7).
double quantile_sorted(std::span<const double> sorted, double p);

struct VarianceProbeConfig {
  int n = 500;
  int reps = 4000;
  double beta0 = 1.0;
  std::vector<double> a_list{50};
  std::vector<double> c_grid{0.02, 0.5};
  std::uint64_t master_seed = 20251015;
  int threads = 0;

  void validate() const;
};

struct VarianceRow {
  int n = 0;
  double c = 0.0;
  Method method = Method::GS;
  std::optional<double> a;
  double var_q = 0.0;
  double se_var = 0.0;  // NaN when too few replicates to estimate it
  int reps = 0;         // replicates with a computable statistic
  bool se_finite = false;
};

/// Monte Carlo Var(q(c)) and Var(q_a(c)) at fixed cutpoints over null
/// datasets (beta1 = 0). Rows are ordered by c, then GS before SSS by a.
std::vector<VarianceRow> variance_probe(const VarianceProbeConfig& cfg);

/// Runs body(i) for i in [0, count) over up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace survsplit
