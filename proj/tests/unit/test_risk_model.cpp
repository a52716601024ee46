#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "survsplit/error.hpp"
#include "survsplit/risk_model.hpp"

using namespace survsplit;

namespace {

Dataset two_subjects() { return {{1.0, true, 0.25}, {2.0, true, 0.75}}; }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected survsplit::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("two-subject risk table") {
  const Dataset data = two_subjects();
  const RiskTable rt = build_risk_table(data);
  CHECK(rt.event_times() == std::vector<double>{1.0, 2.0});
  CHECK(rt.at_risk() == std::vector<int>{2, 1});
  CHECK(rt.failures() == std::vector<int>{1, 1});
  CHECK(rt.weights() == std::vector<double>{1.0, 1.0});
  CHECK(rt.failing(0).size() == 1);
  CHECK(rt.failing(0)[0] == 0);
  CHECK(rt.risk_members(1).size() == 1);
}

TEST_CASE("single subject") {
  const Dataset data{{1.0, true, 0.5}};
  const RiskTable rt = build_risk_table(data);
  CHECK(rt.event_times() == std::vector<double>{1.0});
  CHECK(rt.at_risk() == std::vector<int>{1});
  CHECK(rt.failures() == std::vector<int>{1});
}

TEST_CASE("construction errors") {
  CHECK(code_of([] { build_risk_table(Dataset{{1.0, false, 0.1}, {2.0, false, 0.2}}); }) ==
        ErrorCode::NoEvents);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(code_of([&] { build_risk_table(Dataset{{nan, true, 0.1}}); }) == ErrorCode::NonFinite);
  CHECK(code_of([&] { build_risk_table(Dataset{{inf, true, 0.1}}); }) == ErrorCode::NonFinite);
  CHECK(code_of([] { build_risk_table(Dataset{}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { build_risk_table(two_subjects(), std::vector<double>{1.0}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("censorings at a failure time stay in that risk set") {
  // Subject 1 is censored at t=1, the same time subject 0 fails.
  const Dataset data{{1.0, true, 0.2}, {1.0, false, 0.4}, {3.0, true, 0.6}};
  const RiskTable rt = build_risk_table(data);
  CHECK(rt.event_times() == std::vector<double>{1.0, 3.0});
  CHECK(rt.at_risk() == std::vector<int>{3, 1});
}

TEST_CASE("tied failure times are counted together") {
  const Dataset data{{1.0, true, 0.2}, {1.0, true, 0.4}, {2.0, true, 0.6}, {2.5, false, 0.8}};
  const RiskTable rt = build_risk_table(data);
  CHECK(rt.failures() == std::vector<int>{2, 1});
  CHECK(rt.at_risk() == std::vector<int>{4, 2});
  const LeftCounts lc = left_counts(rt, data, 0.3);
  CHECK(lc.at_risk == std::vector<double>{1.0, 0.0});
  CHECK(lc.failures == std::vector<double>{1.0, 0.0});
}

TEST_CASE("left counts") {
  const Dataset data = two_subjects();
  const RiskTable rt = build_risk_table(data);

  SUBCASE("midpoint") {
    const LeftCounts lc = left_counts(rt, data, 0.5);
    CHECK(lc.at_risk == std::vector<double>{1.0, 0.0});
    CHECK(lc.failures == std::vector<double>{1.0, 0.0});
  }
  SUBCASE("full left node") {
    const LeftCounts lc = left_counts(rt, data, 0.75);
    CHECK(lc.at_risk == std::vector<double>{2.0, 1.0});
    CHECK(lc.failures == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("empty left node") {
    const LeftCounts lc = left_counts(rt, data, 0.1);
    CHECK(lc.at_risk == std::vector<double>{0.0, 0.0});
    CHECK(lc.failures == std::vector<double>{0.0, 0.0});
  }
}

TEST_CASE("candidate cutpoints") {
  auto with_z = [](std::vector<double> zs) {
    Dataset d;
    for (double z : zs) d.push_back({1.0, true, z});
    return d;
  };
  const auto cuts = candidate_cutpoints(with_z({0.2, 0.4, 0.8}));
  REQUIRE(cuts.size() == 2);
  CHECK(cuts[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(cuts[1] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(candidate_cutpoints(with_z({0.1, 0.9})) == std::vector<double>{0.5});
  CHECK(candidate_cutpoints(with_z({0.9, 0.1, 0.9, 0.1})) == std::vector<double>{0.5});
  CHECK(code_of([&] { candidate_cutpoints(with_z({0.5, 0.5})); }) ==
        ErrorCode::DegenerateCovariate);
}

TEST_CASE("risk table invariants on random data") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Dataset data = oracle::random_dataset(rng, 5 + trial * 3);
    // Coarsen some times to create ties.
    if (trial % 2 == 0) {
      for (auto& s : data) s.time = std::round(s.time * 4.0) / 4.0;
    }
    const RiskTable rt = build_risk_table(data);
    const auto n_events = std::count_if(data.begin(), data.end(), [](auto& s) { return s.event; });
    int total_d = 0;
    for (int d : rt.failures()) total_d += d;
    CHECK(total_d == n_events);

    for (std::size_t k = 0; k < rt.num_event_times(); ++k) {
      CHECK(rt.failures()[k] >= 1);
      if (k > 0) {
        CHECK(rt.at_risk()[k] <= rt.at_risk()[k - 1]);
        CHECK(rt.event_times()[k] > rt.event_times()[k - 1]);
      }
      const auto members = rt.risk_members(k);
      CHECK(members.size() == static_cast<std::size_t>(rt.at_risk()[k]));
      for (std::size_t i : rt.failing(k)) {
        CHECK(std::find(members.begin(), members.end(), i) != members.end());
      }
      int expected = 0;
      for (const auto& s : data) expected += s.time >= rt.event_times()[k] ? 1 : 0;
      CHECK(rt.at_risk()[k] == expected);
    }

    const double zmax =
        std::max_element(data.begin(), data.end(), [](auto& x, auto& y) { return x.z < y.z; })->z;
    const LeftCounts full = left_counts(rt, data, zmax);
    for (std::size_t k = 0; k < rt.num_event_times(); ++k) {
      CHECK(full.at_risk[k] == rt.at_risk()[k]);
      CHECK(full.failures[k] == rt.failures()[k]);
    }
  }
}

TEST_CASE("left counts are invariant under increasing covariate transforms") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = oracle::random_dataset(rng, 40);
    Dataset warped = data;
    for (auto& s : warped) s.z = std::exp(3.0 * s.z) / std::exp(3.0);
    const RiskTable rt = build_risk_table(data);
    const RiskTable rt_w = build_risk_table(warped);
    const auto cuts = candidate_cutpoints(data);
    const auto cuts_w = candidate_cutpoints(warped);
    REQUIRE(cuts.size() == cuts_w.size());
    for (std::size_t j = 0; j < cuts.size(); ++j) {
      const LeftCounts a = left_counts(rt, data, cuts[j]);
      const LeftCounts b = left_counts(rt_w, warped, cuts_w[j]);
      CHECK(a.at_risk == b.at_risk);
      CHECK(a.failures == b.failures);
    }
  }
}

TEST_CASE("covariate normalization") {
  Dataset inside{{1.0, true, 0.3}, {2.0, true, 0.9}};
  CHECK_FALSE(normalize_covariate(inside));
  CHECK(inside[0].z == 0.3);

  Dataset raw{{1.0, true, 10.0}, {2.0, true, -4.0}, {3.0, false, 10.0}, {4.0, true, 2.0}};
  CHECK(normalize_covariate(raw));
  // Ranks: -4 -> 1, 2 -> 2, the two 10s share rank 3.5.
  CHECK(raw[1].z == doctest::Approx(0.5 / 4));
  CHECK(raw[3].z == doctest::Approx(1.5 / 4));
  CHECK(raw[0].z == doctest::Approx(3.0 / 4));
  CHECK(raw[2].z == raw[0].z);
}
