#include <benchmark/benchmark.h>

#include "survsplit/datagen.hpp"
#include "survsplit/logrank_hard.hpp"
#include "survsplit/risk_model.hpp"
#include "survsplit/sss_smooth.hpp"

using namespace survsplit;

namespace {

Dataset sample(int n) { return generate_dataset(HazardModel{}, n, SeedSpec{20251015, 0}); }

void BM_GenerateDataset(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_dataset(HazardModel{}, n, SeedSpec{20251015, rep++}));
  }
}

void BM_RiskTable(benchmark::State& state) {
  const Dataset data = sample(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_risk_table(data));
}

void BM_HardStat(benchmark::State& state) {
  const Dataset data = sample(static_cast<int>(state.range(0)));
  const RiskTable rt = build_risk_table(data);
  for (auto _ : state) benchmark::DoNotOptimize(try_hard_stat(rt, data, 0.5));
}

void BM_SoftStat(benchmark::State& state) {
  const Dataset data = sample(static_cast<int>(state.range(0)));
  const RiskTable rt = build_risk_table(data);
  for (auto _ : state) benchmark::DoNotOptimize(try_soft_stat(rt, data, 0.5, 50.0));
}

void BM_GreedySearch(benchmark::State& state) {
  const Dataset data = sample(static_cast<int>(state.range(0)));
  const RiskTable rt = build_risk_table(data);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_search(rt, data));
}

void BM_SssSearch(benchmark::State& state) {
  const Dataset data = sample(static_cast<int>(state.range(0)));
  const RiskTable rt = build_risk_table(data);
  for (auto _ : state) benchmark::DoNotOptimize(sss_search(rt, data, SigmoidParams{50.0, false}));
}

void BM_Moments(benchmark::State& state) {
  double c = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigmoid_moments(c, 50.0));
    c = c < 0.99 ? c + 0.01 : 0.01;
  }
}

}  // namespace

BENCHMARK(BM_GenerateDataset)->Arg(50)->Arg(1000);
BENCHMARK(BM_RiskTable)->Arg(50)->Arg(1000);
BENCHMARK(BM_HardStat)->Arg(50)->Arg(1000);
BENCHMARK(BM_SoftStat)->Arg(50)->Arg(1000);
BENCHMARK(BM_GreedySearch)->Arg(50)->Arg(1000);
BENCHMARK(BM_SssSearch)->Arg(50)->Arg(1000);
BENCHMARK(BM_Moments);

BENCHMARK_MAIN();
