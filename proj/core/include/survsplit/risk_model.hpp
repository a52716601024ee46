#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace survsplit {

/// One observation: follow-up time, event indicator (true = failure seen)
/// and a covariate on [0,1].
struct Subject {
  double time = 0.0;
  bool event = false;
  double z = 0.0;

  friend bool operator==(const Subject&, const Subject&) = default;
};

using Dataset = std::vector<Subject>;

/// Left-node aggregates at each event time, either hard counts or soft
/// (sigmoid-weighted) sums.
struct LeftCounts {
  std::vector<double> at_risk;   // Y_kL
  std::vector<double> failures;  // d_kL
};

/// Event times with their risk sets.
///
/// Subjects are kept in ascending time order (failures ahead of censorings
/// at equal times). The risk set of event time k is then the suffix of that
/// order starting at `risk_start(k)`, which lets every per-cutpoint
/// aggregate be computed with one backward pass.
class RiskTable {
 public:
  /// Throws NoEvents, NonFinite or InvalidArgument (empty data, negative
  /// time, weight count mismatch).
  static RiskTable build(std::span<const Subject> data,
                         std::optional<std::vector<double>> weights = {});

  std::size_t num_subjects() const noexcept { return order_.size(); }
  std::size_t num_event_times() const noexcept { return event_times_.size(); }

  const std::vector<double>& event_times() const noexcept { return event_times_; }
  const std::vector<int>& at_risk() const noexcept { return at_risk_; }
  const std::vector<int>& failures() const noexcept { return failures_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Subject indices ordered by (time ascending, failures first).
  const std::vector<std::size_t>& time_order() const noexcept { return order_; }

  /// Position in `time_order()` where the risk set of event time k begins.
  std::size_t risk_start(std::size_t k) const { return risk_start_.at(k); }

  /// Indices of subjects with time >= t_k.
  std::span<const std::size_t> risk_members(std::size_t k) const;

  /// Indices of subjects failing exactly at t_k (size d_k).
  std::span<const std::size_t> failing(std::size_t k) const;

 private:
  std::vector<double> event_times_;
  std::vector<int> at_risk_;
  std::vector<int> failures_;
  std::vector<double> weights_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> risk_start_;
  std::vector<std::size_t> fail_offsets_;  // size D+1, into fail_members_
  std::vector<std::size_t> fail_members_;
};

inline RiskTable build_risk_table(std::span<const Subject> data,
                                  std::optional<std::vector<double>> weights = {}) {
  return RiskTable::build(data, std::move(weights));
}

/// Aggregates per-subject left weights (an indicator or a sigmoid value,
/// indexed like `data`) into Y_kL and d_kL for every event time.
LeftCounts aggregate_left(const RiskTable& rt, std::span<const double> subject_weight);

/// Hard left-node counts for the split {z <= c}.
LeftCounts left_counts(const RiskTable& rt, std::span<const Subject> data, double c);

/// Sorted midpoints between consecutive distinct covariate values.
/// Throws DegenerateCovariate when fewer than two distinct values exist.
std::vector<double> candidate_cutpoints(std::span<const Subject> data);

/// Maps covariates to (rank - 0.5)/n (average ranks for ties) when any value
/// lies outside [0,1]; leaves the data untouched otherwise. Returns whether
/// the transform was applied.
bool normalize_covariate(Dataset& data);

}  // namespace survsplit
