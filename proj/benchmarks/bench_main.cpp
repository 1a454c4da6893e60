#include <benchmark/benchmark.h>

#include "waitlist/combinatorics.hpp"
#include "waitlist/estimation.hpp"
#include "waitlist/montecarlo.hpp"
#include "waitlist/oracle.hpp"

using namespace waitlist;

static void BM_OracleSummary(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_summary(n, 3, n / 2 + 1, {.workers = workers}));
  }
}
BENCHMARK(BM_OracleSummary)->Args({12, 1})->Args({16, 1})->Args({20, 1})->Args({20, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_Binom(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(binom(n, n / 2));
}
BENCHMARK(BM_Binom)->Arg(20)->Arg(200)->Arg(2000);

static void BM_ExactTest(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(exact_test(static_cast<int>(state.range(0)), 10, 15));
}
BENCHMARK(BM_ExactTest)->Arg(20)->Arg(200);

static void BM_Replication(benchmark::State& state) {
  McConfig config;
  config.n_strata = static_cast<int>(state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(replicate(config, rep++));
}
BENCHMARK(BM_Replication)->Arg(20)->Arg(200)->Unit(benchmark::kMicrosecond);

static void BM_TslsFixedEffects(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> y(n), d(n), z(n);
  std::vector<std::size_t> strata(n);
  for (std::size_t i = 0; i < n; ++i) {
    strata[i] = (i / 2) % 50;
    z[i] = static_cast<double>(i % 2);
    d[i] = rng.uniform() < (z[i] != 0.0 ? 0.8 : 0.3) ? 1.0 : 0.0;
    y[i] = rng.normal(0.2 * d[i], 1.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(tsls(y, d, z, strata, PoolingMode::FixedEffects));
}
BENCHMARK(BM_TslsFixedEffects)->Arg(400)->Arg(40000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
