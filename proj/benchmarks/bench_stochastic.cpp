#include <benchmark/benchmark.h>

#include "chaoslab/rng.hpp"
#include "chaoslab/stochastic.hpp"

using namespace chaoslab;

static void BM_PhiloxUniform(benchmark::State& state) {
  Philox gen(1, 2);
  double acc = 0.0;
  for (auto _ : state) acc += rng::uniform(gen);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_PhiloxUniform);

static void BM_Binomial(benchmark::State& state) {
  Philox gen(1, 2);
  const long long n = state.range(0);
  long long acc = 0;
  for (auto _ : state) acc += rng::binomial(gen, n, 0.2);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Binomial)->Arg(20)->Arg(2000);

static void BM_DrChainStep(benchmark::State& state) {
  DRParamsChain params(0.2, 0.1, 0.1, 1000, 60, 1.0);
  std::vector<int> init(60, 0);
  init[30] = 1;
  for (auto _ : state) {
    auto stats = mc_dr_chain(params, init, 50, 64, 7, 50, 1);
    benchmark::DoNotOptimize(stats.mean.back()[30]);
  }
}
BENCHMARK(BM_DrChainStep)->Unit(benchmark::kMillisecond);

static void BM_EulerMaruyama(benchmark::State& state) {
  for (auto _ : state) {
    auto stats = euler_maruyama(EmProcess::finiteN_dot, -0.9, 1e-3, 1.0, 10000,
                                256, 3, 3, 1);
    benchmark::DoNotOptimize(stats.mean.back()[0]);
  }
}
BENCHMARK(BM_EulerMaruyama)->Unit(benchmark::kMillisecond);
