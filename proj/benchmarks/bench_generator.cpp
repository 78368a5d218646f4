#include <benchmark/benchmark.h>

#include "chaoslab/dot_generator.hpp"

using namespace chaoslab;

static void BM_BuildDotGenerator(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DotModel model(n, 0.5);
  SizeGrid grid(n, 1);
  for (auto _ : state) {
    auto g = build_dot_generator(model, grid);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_BuildDotGenerator)->Arg(64)->Arg(512)->Arg(2048);

static void BM_AlgebraOracleRational(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SizeGrid grid(n, 1);
  for (auto _ : state) {
    auto g = build_dot_generator_from_algebra_rational(n, grid);
    benchmark::DoNotOptimize(g.size());
  }
}
BENCHMARK(BM_AlgebraOracleRational)->Arg(16)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
