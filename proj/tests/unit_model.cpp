#include "doctest.h"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "chaoslab/chain.hpp"
#include "chaoslab/dot_generator.hpp"
#include "chaoslab/rational.hpp"
#include "chaoslab/types.hpp"

using namespace chaoslab;

TEST_CASE("ladder coefficients") {
  auto c = ladder_coeffs(4, -2);
  CHECK(c.f_plus == 1.0);
  CHECK(c.f_minus == 5.0);
  CHECK(c.a1 == 2.0);

  // top of the grid
  auto top = ladder_coeffs(12, 6);
  CHECK(top.f_plus == 13.0);
  CHECK(top.f_minus == 1.0);

  // a_2(m) = f_+(m) f_-(m+1) + f_-(m) f_+(m-1) = N + 2s(N-s)
  auto mid = ladder_coeffs(10, 0);
  CHECK(mid.a2 == doctest::Approx(60.0));
  for (int n : {4, 8, 10, 20}) {
    for (int m = -n / 2; m <= n / 2; ++m) {
      const int s = m + n / 2;
      CHECK(ladder_coeffs(n, m).a2 == doctest::Approx(n + 2.0 * s * (n - s)));
    }
  }

  CHECK_THROWS_AS(ladder_coeffs(8, 5), std::domain_error);
}

TEST_CASE("dot coefficients and rates") {
  DotModel model(10, 1.0);
  CHECK(dot_coeffs(model, 0).c0 == doctest::Approx(-2.4));
  // column-sum conservation at m = 0
  const double col = dot_coeffs(model, 0).c0 + dot_coeffs(model, -2).cplus +
                     dot_coeffs(model, 2).cminus;
  CHECK(col == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(dot_coeffs(model, -2).cplus == doctest::Approx(1.2));
  CHECK(dot_coeffs(model, 2).cminus == doctest::Approx(1.2));

  // the identity operator (s = 0) never grows: Cminus vanishes at m = -N/2+2
  for (int n : {4, 8, 16, 30})
    CHECK(dot_coeffs(DotModel(n, 1.0), -n / 2 + 2).cminus == 0.0);

  // coefficients expressed as outgoing rates
  for (int n : {8, 14}) {
    DotModel m2(n, 0.7);
    for (int s = 0; s <= n; ++s) {
      CHECK(dot_growth_rate(m2, s) >= 0.0);
      CHECK(dot_decay_rate(m2, s) >= 0.0);
      const int m = s - n / 2;
      if (s + 2 <= n)
        CHECK(dot_coeffs(m2, m + 2).cminus ==
              doctest::Approx(dot_growth_rate(m2, s)).epsilon(1e-14));
      if (s - 2 >= 0)
        CHECK(dot_coeffs(m2, m - 2).cplus ==
              doctest::Approx(dot_decay_rate(m2, s)).epsilon(1e-14));
      CHECK(dot_coeffs(m2, m).c0 ==
            doctest::Approx(-(dot_growth_rate(m2, s) + dot_decay_rate(m2, s)))
                .epsilon(1e-13));
    }
  }

  CHECK_THROWS_AS(DotModel(10, 1.0, 6), std::domain_error);
  CHECK_THROWS_AS(DotModel(7, 1.0), std::domain_error);
}

TEST_CASE("rational conservation identity for N <= 64") {
  for (int n = 4; n <= 64; n += 2) {
    for (int parity : {0, 1}) {
      SizeGrid grid(n, parity);
      const RationalMatrix g = build_dot_generator_rational(n, grid);
      for (int j = 0; j < grid.size(); ++j) {
        Rational col(0);
        for (int i = 0; i < grid.size(); ++i) col += g[i][j];
        CHECK(col == Rational(0));
      }
    }
  }
}

TEST_CASE("generator equals algebra oracle, exact rational, N <= 64") {
  for (int n = 4; n <= 64; n += 2) {
    for (int parity : {0, 1}) {
      SizeGrid grid(n, parity);
      const RationalMatrix a = build_dot_generator_rational(n, grid);
      const RationalMatrix b = build_dot_generator_from_algebra_rational(n, grid);
      bool equal = true;
      for (int i = 0; i < grid.size() && equal; ++i)
        for (int j = 0; j < grid.size() && equal; ++j)
          equal = (a[i][j] == b[i][j]);
      CHECK(equal);
    }
  }
}

TEST_CASE("algebra oracle in double, N = 8") {
  DotModel model(8, 1.0);
  SizeGrid grid(8, 1);
  Eigen::MatrixXd a = build_dot_generator(model, grid);
  Eigen::MatrixXd b = build_dot_generator_from_algebra(model, grid);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);

  SizeGrid even(4, 0);
  DotModel m4(4, 1.0);
  Eigen::MatrixXd g4 = build_dot_generator_from_algebra(m4, even);
  CHECK(g4(even.index_of_m(-2), even.index_of_m(-2)) ==
        doctest::Approx(dot_coeffs(m4, -2).c0));
}

TEST_CASE("N=4 even sector: generator conserves and identity is fixed") {
  DotModel model(4, 1.0);
  SizeGrid grid(4, 0);
  Eigen::MatrixXd g = build_dot_generator(model, grid);
  CHECK(g.rows() == 3);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  CHECK((g.transpose() * ones).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd prop = g.exp();  // t = 1/J
  Eigen::VectorXd p0(3);
  p0 << 1.0, 0.0, 0.0;  // identity, s = 0
  Eigen::VectorXd p1 = prop * p0;
  CHECK(std::abs(p1.sum() - 1.0) < 1e-12);
  CHECK((p1 - p0).cwiseAbs().maxCoeff() < 1e-12);  // absorbing fixed point
}

TEST_CASE("chain transitions") {
  SUBCASE("J2 = 0 reduces to the per-site dot generator") {
    ChainModel chain(3, 8, 0.9, 0.0);
    DotModel dot(8, 0.9);
    std::vector<int> m = {-2, 0, 2};
    for (int x = 0; x < 3; ++x) {
      const SiteUpDown r = chain_site_updown(chain, m, x);
      const int s = m[static_cast<std::size_t>(x)] + 4;
      CHECK(r.up == doctest::Approx(dot_growth_rate(dot, s)).epsilon(1e-14));
      CHECK(r.down == doctest::Approx(dot_decay_rate(dot, s)).epsilon(1e-14));
    }
  }

  SUBCASE("all-identity chain is stationary") {
    ChainModel chain(3, 4, 1.0, 1.0);
    std::vector<int> ident = {-2, -2, -2};
    const TransitionSet t = chain_all_transitions(chain, ident);
    CHECK(t.moves.empty());
    CHECK(t.diagonal == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(chain_diagonal_algebraic(chain, ident) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("small-size limit matches the truncated chain rates") {
    // raising rate -> 12 J2 (s_{x+1} + s_{x-1}) + 4 J1 s_x at large N
    const int n = 40000;
    ChainModel chain(3, n, 0.3, 0.7);
    std::vector<int> m = {1 - n / 2, 1 - n / 2, 1 - n / 2};  // s = (1,1,1)
    const SiteUpDown r = chain_site_updown(chain, m, 1);
    const double expected_up = 12.0 * 0.7 * (1 + 1) + 4.0 * 0.3 * 1;
    CHECK(r.up == doctest::Approx(expected_up).epsilon(5e-4));
    // and the state is not stationary
    CHECK(r.up > 0.0);
  }

  SUBCASE("diagonal closure equals the algebraic diagonal") {
    ChainModel chain(3, 12, 0.8, 1.3);
    const std::vector<std::vector<int>> states = {
        {0, 2, -4}, {-6, -6, -6}, {6, -2, 0}, {-4, 4, 2}, {1 - 6, 3 - 6, 5 - 6}};
    for (const auto& m : states) {
      const TransitionSet t = chain_all_transitions(chain, m);
      const double closure = t.diagonal;
      const double algebra = chain_diagonal_algebraic(chain, m);
      CHECK(closure == doctest::Approx(algebra).epsilon(1e-12));
    }
  }

  SUBCASE("off-diagonal rates are non-negative: exhaustive scan L=2, N=8") {
    ChainModel chain(2, 8, 0.5, 0.5);
    for (int s0 = 0; s0 <= 8; ++s0)
      for (int s1 = 0; s1 <= 8; ++s1) {
        std::vector<int> m = {s0 - 4, s1 - 4};
        for (const auto& mv : chain_all_transitions(chain, m).moves)
          CHECK(mv.rate >= 0.0);
      }
  }

  SUBCASE("L = 1 self-neighbor gives a single-site quartic rate") {
    const int n = 16;
    ChainModel chain(1, n, 0.0, 1.0);
    for (int s = 2; s + 2 <= n; s += 2) {
      std::vector<int> m = {s - n / 2};
      const SiteUpDown r = chain_site_updown(chain, m, 0);
      const double a2 = n + 2.0 * s * (n - s);
      const double expect =
          6.0 / (static_cast<double>(n) * n * n) * (n - s) * (n - s - 1.0) *
          (2.0 * a2 - 2.0 * n);
      CHECK(r.up == doctest::Approx(expect).epsilon(1e-13));
    }
  }

  SUBCASE("out-of-range components rejected") {
    ChainModel chain(2, 8, 1.0, 1.0);
    std::vector<int> bad = {5, 0};
    CHECK_THROWS_AS(chain_transitions(chain, bad, 0), std::domain_error);
  }
}

TEST_CASE("size grid and distribution") {
  SizeGrid grid(10, 1);
  CHECK(grid.size() == 5);
  CHECK(grid.points().front() == -4);
  CHECK(grid.points().back() == 4);
  for (int i = 1; i < grid.size(); ++i)
    CHECK(grid.m_at(i) - grid.m_at(i - 1) == 2);
  CHECK_THROWS_AS(grid.index_of_m(1), std::domain_error);  // wrong parity
  CHECK_THROWS_AS(grid.index_of_m(6), std::domain_error);  // out of range

  auto delta = SizeDistribution::delta_at_s(grid, 1);
  CHECK(delta.total() == doctest::Approx(1.0));
  CHECK(delta.prob_at(grid.index_of_s(1)) == 1.0);

  std::vector<double> unnorm(5, 2.0);
  SizeDistribution dist(grid, unnorm);
  CHECK(dist.total() == doctest::Approx(1.0));
  std::vector<double> neg(5, 0.2);
  neg[0] = -1e-3;
  CHECK_THROWS_AS(SizeDistribution(grid, neg), std::domain_error);
}
