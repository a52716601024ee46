#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "survsplit/datagen.hpp"
#include "survsplit/error.hpp"
#include "survsplit/logrank_hard.hpp"

using namespace survsplit;

namespace {

Dataset two_subjects() { return {{1.0, true, 0.25}, {2.0, true, 0.75}}; }

}  // namespace

TEST_CASE("hard statistic on two subjects") {
  const Dataset data = two_subjects();
  const RiskTable rt = build_risk_table(data);
  const HardSplitStat s = hard_stat(rt, data, 0.5);
  CHECK(s.numerator == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.scale_sq == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s.Q == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.Q == s.q * s.q);
}

TEST_CASE("zero scale below the smallest covariate") {
  const Dataset data = two_subjects();
  const RiskTable rt = build_risk_table(data);
  CHECK_FALSE(try_hard_stat(rt, data, 0.1).has_value());
  try {
    hard_stat(rt, data, 0.1);
    FAIL("expected ZeroScale");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroScale);
  }
}

TEST_CASE("mirror symmetry") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = oracle::random_dataset(rng, 30);
    Dataset mirror = data;
    for (auto& s : mirror) s.z = 1.0 - s.z;
    const RiskTable rt = build_risk_table(data);
    const RiskTable rt_m = build_risk_table(mirror);
    // A cutpoint strictly between covariates: {z <= c} mirrors to {z' >= 1-c},
    // i.e. the complement of {z' <= 1-c}.
    for (double c : candidate_cutpoints(data)) {
      const auto s = try_hard_stat(rt, data, c);
      const auto m = try_hard_stat(rt_m, mirror, 1.0 - c);
      REQUIRE(s.has_value() == m.has_value());
      if (!s) continue;
      CHECK(m->numerator == doctest::Approx(-s->numerator).epsilon(1e-10));
      CHECK(m->Q == doctest::Approx(s->Q).epsilon(1e-10));
    }
  }
}

TEST_CASE("hard statistic matches direct enumeration") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset data = oracle::random_dataset(rng, 10 + 5 * trial);
    const RiskTable rt = build_risk_table(data);
    for (double c : candidate_cutpoints(data)) {
      const auto s = try_hard_stat(rt, data, c);
      const auto ref = oracle::hard_sums(data, c);
      REQUIRE(s.has_value() == (ref.scale_sq > 0.0));
      if (!s) continue;
      const double q_ref = ref.numerator * ref.numerator / ref.scale_sq;
      CHECK(std::abs(s->Q - q_ref) <= 1e-12 * std::max(1.0, q_ref));
    }
  }
}

TEST_CASE("greedy search") {
  SUBCASE("single candidate") {
    const Dataset data = two_subjects();
    const RiskTable rt = build_risk_table(data);
    const SplitResult r = greedy_search(rt, data);
    CHECK(r.method == Method::GS);
    CHECK(r.c_hat == 0.5);
    CHECK(r.stat == doctest::Approx(1.0));
    CHECK(r.n_evaluations == 1);
    CHECK_FALSE(r.a.has_value());
  }
  SUBCASE("single covariate value") {
    const Dataset data{{1.0, true, 0.4}, {2.0, true, 0.4}};
    const RiskTable rt = build_risk_table(data);
    try {
      greedy_search(rt, data);
      FAIL("expected NoAdmissibleCut");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoAdmissibleCut);
    }
  }
  SUBCASE("min_child excludes every candidate") {
    const Dataset data = two_subjects();
    const RiskTable rt = build_risk_table(data);
    CHECK_THROWS_AS(greedy_search(rt, data, 2), Error);
  }
  SUBCASE("equal statistics resolve toward the middle") {
    // Mirror-symmetric data, so the candidates 0.2 and 0.8 share one Q.
    const Dataset data{{1.0, true, 0.1}, {1.0, true, 0.9}, {2.0, false, 0.3}, {2.0, false, 0.7}};
    const RiskTable rt = build_risk_table(data);
    const SplitResult r = greedy_search(rt, data);
    double best = -1.0;
    for (double c : candidate_cutpoints(data)) {
      if (auto s = try_hard_stat(rt, data, c)) best = std::max(best, s->Q);
    }
    CHECK(r.stat == best);
    for (double c : candidate_cutpoints(data)) {
      auto s = try_hard_stat(rt, data, c);
      if (s && s->Q == best) CHECK(std::abs(r.c_hat - 0.5) <= std::abs(c - 0.5));
    }
  }
}

TEST_CASE("greedy search returns the enumerated argmax") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = oracle::random_dataset(rng, 25);
    const RiskTable rt = build_risk_table(data);
    const SplitResult r = greedy_search(rt, data);
    double best = -1.0;
    for (double c : candidate_cutpoints(data)) {
      const auto ref = oracle::hard_sums(data, c);
      if (ref.scale_sq > 0.0) best = std::max(best, ref.numerator * ref.numerator / ref.scale_sq);
    }
    CHECK(r.stat == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.c_hat > 0.0);
    CHECK(r.c_hat < 1.0);
  }
}

TEST_CASE("greedy search partition is invariant under increasing transforms") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = oracle::random_dataset(rng, 40);
    Dataset warped = data;
    for (auto& s : warped) s.z = s.z * s.z * s.z;
    const SplitResult r = greedy_search(build_risk_table(data), data);
    const SplitResult rw = greedy_search(build_risk_table(warped), warped);
    for (std::size_t i = 0; i < data.size(); ++i) {
      CHECK((data[i].z <= r.c_hat) == (warped[i].z <= rw.c_hat));
    }
  }
}

TEST_CASE("min_child bounds both children") {
  const Dataset data = generate_dataset(HazardModel{}, 60, SeedSpec{1, 0});
  const RiskTable rt = build_risk_table(data);
  const SplitResult r = greedy_search(rt, data, 10);
  int left = 0;
  for (const auto& s : data) left += s.z <= r.c_hat ? 1 : 0;
  CHECK(left >= 10);
  CHECK(60 - left >= 10);
}

TEST_CASE("null greedy search piles up near the boundary") {
  // End-cut preference in miniature: with n=1000 the maximizer sits in the
  // outer 5% on either side far more often than the 10% a uniform law gives.
  int edge = 0;
  const int reps = 100;
  for (int rep = 0; rep < reps; ++rep) {
    const Dataset data = generate_dataset(HazardModel{}, 1000, SeedSpec{99, static_cast<std::uint64_t>(rep)});
    const SplitResult r = greedy_search(build_risk_table(data), data);
    if (std::min(r.c_hat, 1.0 - r.c_hat) < 0.05) ++edge;
  }
  CHECK(edge >= 40);
}
