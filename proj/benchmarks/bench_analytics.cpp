#include <benchmark/benchmark.h>

#include "chaoslab/analytics.hpp"
#include "chaoslab/spectrum.hpp"

using namespace chaoslab;

static void BM_TricomiU(benchmark::State& state) {
  double z = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tricomi_u(0.5, 1.0, z));
    z = z < 1000.0 ? z * 1.1 : 0.5;
  }
}
BENCHMARK(BM_TricomiU);

static void BM_OtocClosed(benchmark::State& state) {
  LargeNJob job(10000, 0.5, 1, 1);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(otoc_large_n(t, job, OtocMode::closed));
    t = t < 4.0 ? t + 0.01 : 0.0;
  }
}
BENCHMARK(BM_OtocClosed);

static void BM_SpectrumBuild(benchmark::State& state) {
  const auto rates = rates_large_n_table(1, 41);
  for (auto _ : state) {
    BidiagonalSpectrum spec(1, rates);
    benchmark::DoNotOptimize(spec.reconstruct(1, 15, 1.0));
  }
}
BENCHMARK(BM_SpectrumBuild);

static void BM_SizeDistFiniteN(benchmark::State& state) {
  LargeNJob job(100000, 0.5, 1, 1, 1000);
  double xi = -0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(size_dist_finite_n(xi, 2.2, job));
    xi = xi < -0.1 ? xi + 0.05 : -0.9;
  }
}
BENCHMARK(BM_SizeDistFiniteN);
