#include "survsplit/logrank_hard.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "survsplit/error.hpp"

namespace survsplit {

std::string_view to_string(Method m) {
  return m == Method::GS ? "GS" : "SSS";
}

LogrankSums logrank_sums(const RiskTable& rt, const LeftCounts& left) {
  const auto& y = rt.at_risk();
  const auto& d = rt.failures();
  const auto& w = rt.weights();
  LogrankSums out;
  for (std::size_t k = 0; k < rt.num_event_times(); ++k) {
    const double b = left.at_risk[k] / static_cast<double>(y[k]);
    out.numerator += w[k] * (left.failures[k] - static_cast<double>(d[k]) * b);
    out.scale_sq += w[k] * w[k] * b * (1.0 - b);
  }
  return out;
}

std::optional<HardSplitStat> try_hard_stat(const RiskTable& rt, std::span<const Subject> data,
                                           double c) {
  const LogrankSums sums = logrank_sums(rt, left_counts(rt, data, c));
  if (!(sums.scale_sq > 0.0)) return std::nullopt;
  HardSplitStat s;
  s.c = c;
  s.numerator = sums.numerator;
  s.scale_sq = sums.scale_sq;
  s.q = sums.numerator / std::sqrt(sums.scale_sq);
  s.Q = s.q * s.q;
  return s;
}

HardSplitStat hard_stat(const RiskTable& rt, std::span<const Subject> data, double c) {
  auto s = try_hard_stat(rt, data, c);
  if (!s) {
    throw Error(ErrorCode::ZeroScale, "hard_stat: zero variance scale at c=" + std::to_string(c));
  }
  return *s;
}

namespace {

// True when (q1, c1) should replace the incumbent (q0, c0).
bool better(double q1, double c1, double q0, double c0) {
  if (q1 != q0) return q1 > q0;
  const double d1 = std::abs(c1 - 0.5);
  const double d0 = std::abs(c0 - 0.5);
  if (d1 != d0) return d1 < d0;
  return c1 < c0;
}

}  // namespace

SplitResult greedy_search(const RiskTable& rt, std::span<const Subject> data, int min_child) {
  std::vector<double> cuts;
  try {
    cuts = candidate_cutpoints(data);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateCovariate) throw;
    throw Error(ErrorCode::NoAdmissibleCut, "greedy_search: covariate has a single value");
  }

  std::vector<double> zs;
  zs.reserve(data.size());
  for (const auto& s : data) zs.push_back(s.z);
  std::sort(zs.begin(), zs.end());
  const long n = static_cast<long>(zs.size());

  SplitResult best;
  best.method = Method::GS;
  bool found = false;
  for (double c : cuts) {
    const long n_left = std::upper_bound(zs.begin(), zs.end(), c) - zs.begin();
    if (n_left < min_child || n - n_left < min_child) continue;
    const auto s = try_hard_stat(rt, data, c);
    ++best.n_evaluations;
    if (!s) continue;
    if (!found || better(s->Q, c, best.stat, best.c_hat)) {
      best.c_hat = c;
      best.stat = s->Q;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::NoAdmissibleCut, "greedy_search: no admissible cutpoint");
  }
  return best;
}

}  // namespace survsplit
