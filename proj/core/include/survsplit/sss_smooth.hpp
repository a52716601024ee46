#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "survsplit/logrank_hard.hpp"
#include "survsplit/risk_model.hpp"

namespace survsplit {

/// Sigmoid steepness. With `adaptive` set, a is resolved per dataset as
/// sqrt(n) and the stored value is ignored.
struct SigmoidParams {
  double a = 50.0;
  bool adaptive = false;
};

double resolve_a(const SigmoidParams& params, std::size_t n);

struct SoftSplitStat {
  double c = 0.0;
  double a = 0.0;
  double numerator = 0.0;
  double scale_sq = 0.0;
  double q = 0.0;
};

/// Mean and variance of s_a(Z;c) for Z ~ Uniform(0,1).
struct SigmoidMoments {
  double c = 0.0;
  double a = 0.0;
  double b_a = 0.0;
  double psi_a = 0.0;
};

struct SoftCounts {
  std::vector<double> at_risk;        // Y^(a)_kL
  std::vector<double> failures;       // d^(a)_kL
  std::vector<double> left_fraction;  // b^(a)_k
};

struct SssOptions {
  double lo = 0.0;
  double hi = 1.0;
  int grid_points = 1024;
  double tol_c = 1e-8;
};

/// 1 / (1 + exp(a (z - c))), never exponentiating a positive argument.
double sigmoid_weight(double z, double c, double a);

/// Logistic function 1 / (1 + exp(-x)), branch-split for stability.
double logistic(double x);

/// log(1 + exp(x)) = max(x, 0) + log1p(exp(-|x|)).
double softplus(double x);

SoftCounts soft_counts(const RiskTable& rt, std::span<const Subject> data, double c, double a);

/// Returns nullopt only when S_a^2 underflows to zero.
std::optional<SoftSplitStat> try_soft_stat(const RiskTable& rt, std::span<const Subject> data,
                                           double c, double a);

/// Throws ZeroScale when S_a^2 = 0.
SoftSplitStat soft_stat(const RiskTable& rt, std::span<const Subject> data, double c, double a);

/// Maximizes q_a(c)^2 over [opts.lo, opts.hi]: a scan of `grid_points`
/// equally spaced interior points, then golden-section refinement within
/// one grid cell of the best point.
SplitResult sss_search(const RiskTable& rt, std::span<const Subject> data,
                       const SigmoidParams& params, const SssOptions& opts = {});

double b_a_closed(double c, double a);

/// b_a (1 - b_a) - (sigma(ac) - sigma(a(c-1))) / a, clamped at zero.
double psi_a_closed(double c, double a);

SigmoidMoments sigmoid_moments(double c, double a);

/// Within-risk-set average of s (1 - s) at event time k.
double delta_ka(const RiskTable& rt, std::span<const Subject> data, std::size_t k, double c,
                double a);

}  // namespace survsplit
