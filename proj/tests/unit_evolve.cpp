#include "doctest.h"

#include <cmath>
#include <vector>

#include "chaoslab/dot_generator.hpp"
#include "chaoslab/evolve.hpp"
#include "chaoslab/types.hpp"

using namespace chaoslab;

TEST_CASE("identity start is absorbing") {
  DotModel model(8, 1.0);
  SizeGrid grid(8, 0);
  auto init = SizeDistribution::delta_at_s(grid, 0);
  EvolveConfig cfg;
  cfg.t_max = 3.0;
  cfg.record_stride = 100;
  auto traj = evolve_dot(model, init, cfg);
  for (const auto& [t, dist] : traj) {
    CHECK(dist.prob_at(grid.index_of_s(0)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rk4 agrees with the matrix exponential") {
  DotModel model(8, 1.0);
  SizeGrid grid(8, 1);
  auto init = SizeDistribution::delta_at_s(grid, 1);

  EvolveConfig rk;
  rk.t_max = 2.0;
  rk.record_stride = 1 << 20;  // only t = 0 and the final state
  auto traj_rk = evolve_dot(model, init, rk);

  EvolveConfig ex;
  ex.t_max = 2.0;
  ex.method = Integrator::expm;
  ex.dt = 2.0;
  ex.record_stride = 1;
  auto traj_ex = evolve_dot(model, init, ex);

  const auto& p_rk = traj_rk.back().second;
  const auto& p_ex = traj_ex.back().second;
  CHECK(traj_rk.back().first == doctest::Approx(2.0));
  CHECK(traj_ex.back().first == doctest::Approx(2.0));
  double max_diff = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    max_diff = std::max(max_diff, std::abs(p_rk.prob_at(i) - p_ex.prob_at(i)));
  CHECK(max_diff < 1e-8);
}

TEST_CASE("conservation and positivity, N = 400") {
  DotModel model(400, 0.5);
  SizeGrid grid(400, 1);
  auto init = SizeDistribution::delta_at_s(grid, 1);
  EvolveConfig cfg;
  cfg.t_max = 4.0;
  cfg.record_stride = 500;

  double min_p = 0.0;
  double worst_drift = 0.0;
  evolve_dot_observe(model, init, cfg,
                     [&](double, const std::vector<double>& p) {
                       double sum = 0.0;
                       for (double v : p) {
                         sum += v;
                         min_p = std::min(min_p, v);
                       }
                       worst_drift = std::max(worst_drift, std::abs(sum - 1.0));
                     });
  CHECK(worst_drift < 1e-9);
  CHECK(min_p > -1e-10);
}

TEST_CASE("dt above the stability bound is rejected") {
  DotModel model(100, 1.0);
  SizeGrid grid(100, 1);
  auto init = SizeDistribution::delta_at_s(grid, 1);
  EvolveConfig cfg;
  cfg.t_max = 1.0;
  cfg.dt = 1.0 / 100.0;  // > 0.1/(J N)
  CHECK_THROWS_AS(evolve_dot(model, init, cfg), ConfigError);
}

TEST_CASE("otoc moments") {
  SizeGrid grid(10, 0);
  std::vector<double> uniform(static_cast<std::size_t>(grid.size()),
                              1.0 / grid.size());
  SizeDistribution dist(grid, uniform);
  CHECK(otoc_moment(dist, 0) == doctest::Approx(1.0));
  CHECK(otoc_moment(dist, 2) == doctest::Approx(0.466666666667));

  auto bottom = SizeDistribution::delta_at_s(grid, 0);  // m = -N/2
  CHECK(otoc_moment(bottom, 1) == doctest::Approx(-1.0));

  // evolved identity state keeps (-1)^n moments
  DotModel model(8, 1.0);
  SizeGrid g8(8, 0);
  auto ident = SizeDistribution::delta_at_s(g8, 0);
  EvolveConfig cfg;
  cfg.t_max = 1.5;
  cfg.record_stride = 1 << 20;
  auto traj = evolve_dot(model, ident, cfg);
  CHECK(otoc_moment(traj.back().second, 3) == doctest::Approx(-1.0));
  CHECK(otoc_moment(traj.back().second, 4) == doctest::Approx(1.0));
}

TEST_CASE("generating function") {
  SizeGrid grid(8, 0);
  auto mid = SizeDistribution::delta_at_s(grid, 4);  // m = 0
  CHECK(generating_function(mid, 3.7) == doctest::Approx(1.0));

  std::vector<double> probs = {0.1, 0.3, 0.2, 0.25, 0.15};
  SizeDistribution dist(grid, probs);
  CHECK(generating_function(dist, 0.0) == doctest::Approx(1.0));

  const double h = 1e-5;
  const double deriv =
      (generating_function(dist, h) - generating_function(dist, -h)) / (2 * h);
  CHECK(deriv == doctest::Approx(-otoc_moment(dist, 1)).epsilon(1e-6));

  CHECK_THROWS_AS(generating_function(dist, 701.0), std::domain_error);
}

TEST_CASE("otoc curve start and ordering") {
  DotModel model(100, 0.5);
  EvolveConfig cfg;
  cfg.t_max = 0.5;
  cfg.record_stride = 50;
  auto f11 = otoc_curve(model, 1, 1, cfg);
  CHECK(f11.values.front() == doctest::Approx(-1.0 + 2.0 / 100.0));

  DotModel m200(200, 0.5);
  EvolveConfig cfg2;
  cfg2.t_max = 1.0;
  cfg2.record_stride = 100;
  auto f12 = otoc_curve(m200, 1, 2, cfg2);
  auto f22 = otoc_curve(m200, 2, 2, cfg2);
  // larger initial source scrambles faster: the n = 2 moment decays sooner
  for (std::size_t k = 1; k < f12.size(); ++k) {
    CHECK(f22.values[k] < f12.values[k]);
  }
}

TEST_CASE("exact chain evolution") {
  SUBCASE("J2 = 0 factorizes into dot marginals") {
    ChainModel chain(2, 8, 1.0, 0.0);
    std::vector<int> init = {1, 3};
    EvolveConfig cfg;
    cfg.t_max = 0.5;
    cfg.dt = 1e-4;
    cfg.record_stride = 1 << 20;
    auto traj = evolve_chain_exact(chain, init, cfg);
    const int last = static_cast<int>(traj.times.size()) - 1;

    DotModel dot(8, 1.0);
    SizeGrid grid(8, 1);
    EvolveConfig dcfg;
    dcfg.t_max = traj.times[static_cast<std::size_t>(last)];
    dcfg.dt = 1e-4;
    dcfg.record_stride = 1 << 20;
    auto d1 = evolve_dot(dot, SizeDistribution::delta_at_s(grid, 1), dcfg);
    auto d2 = evolve_dot(dot, SizeDistribution::delta_at_s(grid, 3), dcfg);

    auto m0 = traj.marginal(last, 0);
    auto m1 = traj.marginal(last, 1);
    for (int i = 0; i < grid.size(); ++i) {
      CHECK(m0[static_cast<std::size_t>(i)] ==
            doctest::Approx(d1.back().second.prob_at(i)).epsilon(1e-8));
      CHECK(m1[static_cast<std::size_t>(i)] ==
            doctest::Approx(d2.back().second.prob_at(i)).epsilon(1e-8));
    }

    // joint equals the product of marginals in the decoupled limit
    const auto& joint = traj.joints[static_cast<std::size_t>(last)];
    std::vector<int> sizes;
    double worst = 0.0;
    for (std::int64_t f = 0; f < traj.space.states(); ++f) {
      traj.space.decode(f, sizes);
      const double prod = m0[static_cast<std::size_t>((sizes[0] - 1) / 2)] *
                          m1[static_cast<std::size_t>((sizes[1] - 1) / 2)];
      worst = std::max(worst, std::abs(joint[static_cast<std::size_t>(f)] - prod));
    }
    CHECK(worst < 1e-8);
  }

  SUBCASE("site-swap symmetry is preserved") {
    ChainModel chain(2, 8, 1.0, 1.0);
    std::vector<int> init = {1, 1};
    EvolveConfig cfg;
    cfg.t_max = 0.4;
    cfg.dt = 2e-4;
    cfg.record_stride = 1 << 20;
    auto traj = evolve_chain_exact(chain, init, cfg);
    const int last = static_cast<int>(traj.times.size()) - 1;
    const auto& joint = traj.joints[static_cast<std::size_t>(last)];
    std::vector<int> sizes;
    for (std::int64_t f = 0; f < traj.space.states(); ++f) {
      traj.space.decode(f, sizes);
      std::vector<int> swapped = {sizes[1], sizes[0]};
      const double pswap =
          joint[static_cast<std::size_t>(traj.space.encode(swapped))];
      CHECK(joint[static_cast<std::size_t>(f)] ==
            doctest::Approx(pswap).epsilon(1e-10));
    }
    double total = 0.0;
    for (double v : joint) total += v;
    CHECK(std::abs(total - 1.0) < 1e-8);
  }

  SUBCASE("state-space cap is enforced") {
    ChainModel chain(8, 20, 1.0, 1.0);
    std::vector<int> init(8, 0);
    EvolveConfig cfg;
    CHECK_THROWS_AS(evolve_chain_exact(chain, init, cfg), ConfigError);
  }
}
