#include <benchmark/benchmark.h>

#include "chaoslab/evolve.hpp"

using namespace chaoslab;

// One unit of time of the dot master equation at the default step.
static void BM_EvolveDotUnitTime(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DotModel model(n, 0.5);
  SizeGrid grid(n, 1);
  auto init = SizeDistribution::delta_at_s(grid, 1);
  EvolveConfig cfg;
  cfg.t_max = 1.0;
  cfg.record_stride = 1 << 20;
  for (auto _ : state) {
    double last = 0.0;
    evolve_dot_observe(model, init, cfg,
                       [&](double, const std::vector<double>& p) {
                         last = p.back();
                       });
    benchmark::DoNotOptimize(last);
  }
}
BENCHMARK(BM_EvolveDotUnitTime)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_OtocMoment(benchmark::State& state) {
  SizeGrid grid(10000, 1);
  std::vector<double> probs(static_cast<std::size_t>(grid.size()),
                            1.0 / grid.size());
  SizeDistribution dist(grid, probs);
  for (auto _ : state) benchmark::DoNotOptimize(otoc_moment(dist, 2));
}
BENCHMARK(BM_OtocMoment);
