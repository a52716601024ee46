#include "survsplit/sss_smooth.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "survsplit/error.hpp"
#include "survsplit/golden_section.hpp"

namespace survsplit {

double resolve_a(const SigmoidParams& params, std::size_t n) {
  const double a = params.adaptive ? std::sqrt(static_cast<double>(n)) : params.a;
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw Error(ErrorCode::InvalidArgument, "sigmoid shape a must be positive and finite");
  }
  return a;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sigmoid_weight(double z, double c, double a) {
  return logistic(a * (c - z));
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

namespace {

// q_a(c) evaluator with buffers reused across calls. Subject covariates are
// stored in risk-table time order so the risk-set sums are one backward pass.
class SoftObjective {
 public:
  SoftObjective(const RiskTable& rt, std::span<const Subject> data) : rt_(rt) {
    const auto& order = rt.time_order();
    z_.resize(order.size());
    s_.resize(order.size());
    pos_of_.resize(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
      z_[p] = data[order[p]].z;
      pos_of_[order[p]] = p;
    }
  }

  LogrankSums sums(double c, double a) {
    const auto& y = rt_.at_risk();
    const auto& d = rt_.failures();
    const auto& w = rt_.weights();
    LogrankSums out;
    double suffix = 0.0;
    std::size_t pos = z_.size();
    for (std::size_t k = rt_.num_event_times(); k-- > 0;) {
      const std::size_t start = rt_.risk_start(k);
      while (pos > start) {
        --pos;
        s_[pos] = sigmoid_weight(z_[pos], c, a);
        suffix += s_[pos];
      }
      double fail = 0.0;
      for (std::size_t i : rt_.failing(k)) fail += s_[pos_of_[i]];
      const double b = suffix / static_cast<double>(y[k]);
      out.numerator += w[k] * (fail - static_cast<double>(d[k]) * b);
      out.scale_sq += w[k] * w[k] * b * (1.0 - b);
    }
    return out;
  }

  // q_a(c)^2, or -inf where the scale vanishes.
  double objective(double c, double a) {
    ++evaluations;
    const LogrankSums s = sums(c, a);
    if (!(s.scale_sq > 0.0)) return -std::numeric_limits<double>::infinity();
    return s.numerator * s.numerator / s.scale_sq;
  }

  long evaluations = 0;

 private:
  const RiskTable& rt_;
  std::vector<double> z_;
  std::vector<double> s_;
  std::vector<std::size_t> pos_of_;
};

void check_size(const RiskTable& rt, std::span<const Subject> data) {
  if (rt.num_subjects() != data.size()) {
    throw Error(ErrorCode::InvalidArgument, "risk table and dataset sizes differ");
  }
}

}  // namespace

SoftCounts soft_counts(const RiskTable& rt, std::span<const Subject> data, double c, double a) {
  check_size(rt, data);
  std::vector<double> s(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) s[i] = sigmoid_weight(data[i].z, c, a);
  LeftCounts left = aggregate_left(rt, s);
  SoftCounts out;
  out.left_fraction.resize(left.at_risk.size());
  for (std::size_t k = 0; k < left.at_risk.size(); ++k) {
    out.left_fraction[k] = left.at_risk[k] / static_cast<double>(rt.at_risk()[k]);
  }
  out.at_risk = std::move(left.at_risk);
  out.failures = std::move(left.failures);
  return out;
}

std::optional<SoftSplitStat> try_soft_stat(const RiskTable& rt, std::span<const Subject> data,
                                           double c, double a) {
  check_size(rt, data);
  SoftObjective obj(rt, data);
  const LogrankSums sums = obj.sums(c, a);
  if (!(sums.scale_sq > 0.0)) return std::nullopt;
  SoftSplitStat s;
  s.c = c;
  s.a = a;
  s.numerator = sums.numerator;
  s.scale_sq = sums.scale_sq;
  s.q = sums.numerator / std::sqrt(sums.scale_sq);
  return s;
}

SoftSplitStat soft_stat(const RiskTable& rt, std::span<const Subject> data, double c, double a) {
  auto s = try_soft_stat(rt, data, c, a);
  if (!s) {
    throw Error(ErrorCode::ZeroScale, "soft_stat: variance scale underflowed at c=" +
                                          std::to_string(c) + ", a=" + std::to_string(a));
  }
  return *s;
}

SplitResult sss_search(const RiskTable& rt, std::span<const Subject> data,
                       const SigmoidParams& params, const SssOptions& opts) {
  check_size(rt, data);
  if (opts.grid_points < 1) {
    throw Error(ErrorCode::InvalidArgument, "sss_search: grid_points must be >= 1");
  }
  if (!(opts.lo < opts.hi)) {
    throw Error(ErrorCode::InvalidArgument, "sss_search: empty search domain");
  }
  const double a = resolve_a(params, data.size());
  SoftObjective obj(rt, data);

  const int g = opts.grid_points;
  const double step = (opts.hi - opts.lo) / static_cast<double>(g + 1);
  auto grid = [&](int i) { return i == g + 1 ? opts.hi : opts.lo + step * i; };

  // Exact ties (plateaus when a is huge) resolve toward 0.5, as in GS.
  int best_i = 0;
  double best_f = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= g; ++i) {
    const double f = obj.objective(grid(i), a);
    if (f > best_f ||
        (f == best_f && std::abs(grid(i) - 0.5) < std::abs(grid(best_i) - 0.5))) {
      best_f = f;
      best_i = i;
    }
  }
  if (std::isinf(best_f)) {
    throw Error(ErrorCode::ZeroScale, "sss_search: variance scale is zero on the whole grid");
  }

  double c_hat = grid(best_i);
  const auto refined = golden_section_maximize([&](double c) { return obj.objective(c, a); },
                                               grid(best_i - 1), grid(best_i + 1), opts.tol_c);
  if (refined.fx > best_f) {
    c_hat = refined.x;
    best_f = refined.fx;
  }

  SplitResult r;
  r.method = Method::SSS;
  r.c_hat = c_hat;
  r.stat = best_f;
  r.a = a;
  r.n_evaluations = obj.evaluations;
  return r;
}

double b_a_closed(double c, double a) {
  return (softplus(a * c) - softplus(a * (c - 1.0))) / a;
}

double psi_a_closed(double c, double a) {
  const double b = b_a_closed(c, a);
  const double raw = b * (1.0 - b) - (logistic(a * c) - logistic(a * (c - 1.0))) / a;
  assert(raw >= -1e-12);
  return raw < 0.0 ? 0.0 : raw;
}

SigmoidMoments sigmoid_moments(double c, double a) {
  return SigmoidMoments{c, a, b_a_closed(c, a), psi_a_closed(c, a)};
}

double delta_ka(const RiskTable& rt, std::span<const Subject> data, std::size_t k, double c,
                double a) {
  check_size(rt, data);
  if (k >= rt.num_event_times()) {
    throw Error(ErrorCode::InvalidArgument, "delta_ka: event-time index out of range");
  }
  double acc = 0.0;
  for (std::size_t i : rt.risk_members(k)) {
    const double s = sigmoid_weight(data[i].z, c, a);
    acc += s * (1.0 - s);
  }
  return acc / static_cast<double>(rt.at_risk()[k]);
}

}  // namespace survsplit
