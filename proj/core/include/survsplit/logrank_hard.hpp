#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "survsplit/risk_model.hpp"

namespace survsplit {

enum class Method { GS, SSS };

std::string_view to_string(Method m);

/// Logrank numerator N(c), variance scale S^2(c), q = N/S and Q = q^2 for
/// the hard split {z <= c}.
struct HardSplitStat {
  double c = 0.0;
  double numerator = 0.0;
  double scale_sq = 0.0;
  double q = 0.0;
  double Q = 0.0;
};

struct SplitResult {
  Method method = Method::GS;
  double c_hat = 0.0;
  double stat = 0.0;
  std::optional<double> a;
  long n_evaluations = 0;
};

/// Shared by the hard and soft statistics: N = sum w_k (d_kL - d_k b_k),
/// S^2 = sum w_k^2 b_k (1 - b_k) with b_k = Y_kL / Y_k.
struct LogrankSums {
  double numerator = 0.0;
  double scale_sq = 0.0;
};

LogrankSums logrank_sums(const RiskTable& rt, const LeftCounts& left);

/// Returns nullopt when S^2(c) = 0 (every b_k is 0 or 1).
std::optional<HardSplitStat> try_hard_stat(const RiskTable& rt, std::span<const Subject> data,
                                           double c);

/// Throws ZeroScale when S^2(c) = 0.
HardSplitStat hard_stat(const RiskTable& rt, std::span<const Subject> data, double c);

/// Exhaustive search over candidate midpoints. Candidates leaving fewer than
/// `min_child` subjects on either side, or with S^2 = 0, are skipped. Equal
/// Q values resolve toward the cutpoint nearest 0.5, then the smaller one.
/// Throws NoAdmissibleCut, including when z takes a single value.
SplitResult greedy_search(const RiskTable& rt, std::span<const Subject> data, int min_child = 0);

}  // namespace survsplit
