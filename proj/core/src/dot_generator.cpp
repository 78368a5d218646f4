#include "chaoslab/dot_generator.hpp"

#include <cstdint>
#include <string>

namespace chaoslab {

namespace {

void check_m_range(int n, int m, const char* who) {
  if (m < -n / 2 || m > n / 2)
    throw std::domain_error(std::string(who) + ": |m| <= N/2 required, got m = " +
                            std::to_string(m) + " at N = " + std::to_string(n));
}

}  // namespace

LadderCoeffs ladder_coeffs(int n_fermions, int m) {
  check_m_range(n_fermions, m, "ladder_coeffs");
  const double half_n = n_fermions / 2.0;
  auto fp = [&](int k) { return k + half_n + 1; };
  auto fm = [&](int k) { return half_n - k + 1; };
  LadderCoeffs c;
  c.f_plus = fp(m);
  c.f_minus = fm(m);
  c.a1 = fp(m) * fp(m + 1);
  c.a2 = fp(m) * fm(m + 1) + fm(m) * fp(m - 1);
  c.a3 = fm(m) * fm(m - 1);
  return c;
}

DotCoeffs dot_coeffs(const DotModel& model, int m) {
  const int n = model.n_fermions;
  check_m_range(n, m, "dot_coeffs");
  const double j = model.coupling;
  const double nn = static_cast<double>(n);
  const double n3 = nn * nn * nn;
  const double tm = 2.0 * m;
  DotCoeffs c;
  c.c0 = (tm - nn) * (tm + nn) * (4.0 * m * m + nn * nn - 6.0 * nn + 8.0) /
         (2.0 * n3) * j;
  c.cplus = -(tm - nn + 4.0) * (tm + nn) * (tm + nn + 2.0) * (tm + nn + 4.0) /
            (4.0 * n3) * j;
  c.cminus = -(tm - nn - 4.0) * (tm - nn - 2.0) * (tm - nn) * (tm + nn - 4.0) /
             (4.0 * n3) * j;
  return c;
}

double dot_growth_rate(const DotModel& model, int s) {
  const double n = model.n_fermions;
  return 4.0 * model.coupling * s * (n - s) * (n - s - 1) * (n - s - 2) /
         (n * n * n);
}

double dot_decay_rate(const DotModel& model, int s) {
  const double n = model.n_fermions;
  return 4.0 * model.coupling * (n - s) * s * (s - 1) * (s - 2) / (n * n * n);
}

Eigen::MatrixXd build_dot_generator(const DotModel& model, const SizeGrid& grid) {
  if (grid.n_fermions() != model.n_fermions)
    throw std::domain_error("build_dot_generator: grid/model N mismatch");
  const int dim = grid.size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const int m = grid.m_at(i);
    const DotCoeffs c = dot_coeffs(model, m);
    g(i, i) = c.c0;
    if (grid.contains_m(m + 2)) g(i, grid.index_of_m(m + 2)) = c.cplus;
    if (grid.contains_m(m - 2)) g(i, grid.index_of_m(m - 2)) = c.cminus;
  }
  return g;
}

namespace {

// Tridiagonal ladder matrices on the full basis s = 0..N, column = source
// state; out-of-range targets are dropped (those kets do not exist).
RationalMatrix ladder_matrix(int n, bool antisymmetric_lowering) {
  const int dim = n + 1;
  RationalMatrix a(dim, std::vector<Rational>(dim, Rational(0)));
  for (int s = 0; s <= n; ++s) {
    if (s + 1 <= n) a[s + 1][s] = Rational(s + 1);           // f_+(s)
    if (s - 1 >= 0)
      a[s - 1][s] = Rational(antisymmetric_lowering ? -(n - s + 1) : n - s + 1);
  }
  return a;
}

RationalMatrix matmul(const RationalMatrix& a, const RationalMatrix& b) {
  const int dim = static_cast<int>(a.size());
  RationalMatrix c(dim, std::vector<Rational>(dim, Rational(0)));
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) {
      if (a[i][k].is_zero()) continue;
      for (int j = 0; j < dim; ++j) {
        if (b[k][j].is_zero()) continue;
        c[i][j] += a[i][k] * b[k][j];
      }
    }
  return c;
}

std::int64_t binom4(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) * (n - 2) * (n - 3) / 24;
}

}  // namespace

RationalMatrix build_dot_generator_rational(int n, const SizeGrid& grid) {
  const int dim = grid.size();
  RationalMatrix g(dim, std::vector<Rational>(dim, Rational(0)));
  const Rational n3(static_cast<std::int64_t>(n) * n * n);
  for (int i = 0; i < dim; ++i) {
    const std::int64_t m = grid.m_at(i);
    const std::int64_t tm = 2 * m;
    g[i][i] = Rational((tm - n) * (tm + n) * (4 * m * m + static_cast<std::int64_t>(n) * n - 6 * n + 8)) /
              (Rational(2) * n3);
    if (grid.contains_m(static_cast<int>(m) + 2))
      g[i][grid.index_of_m(static_cast<int>(m) + 2)] =
          -Rational((tm - n + 4) * (tm + n) * (tm + n + 2) * (tm + n + 4)) /
          (Rational(4) * n3);
    if (grid.contains_m(static_cast<int>(m) - 2))
      g[i][grid.index_of_m(static_cast<int>(m) - 2)] =
          -Rational((tm - n - 4) * (tm - n - 2) * (tm - n) * (tm + n - 4)) /
          (Rational(4) * n3);
  }
  return g;
}

RationalMatrix build_dot_generator_from_algebra_rational(int n,
                                                         const SizeGrid& grid) {
  const int dim = n + 1;
  // A = 2 L_x, B = 2i L_y; L_x^2 = A^2/4, L_y^2 = -B^2/4.
  const RationalMatrix a = ladder_matrix(n, false);
  const RationalMatrix b = ladder_matrix(n, true);
  const RationalMatrix a2 = matmul(a, a);
  const RationalMatrix a4 = matmul(a2, a2);
  const RationalMatrix b2 = matmul(b, b);
  const RationalMatrix b4 = matmul(b2, b2);

  // Liouvillian on kets: (6/N^3) (-2 binom(N,4) + (1/24)(scr_x + scr_z - scr_y))
  // with scr_a = 32 L_a^4 + 8(8-6N) L_a^2 + 6N(N-2). In terms of A and B:
  // scr_x - scr_y = 2(A^4 - B^4) + 2(8-6N)(A^2 + B^2), constants cancelling.
  const Rational two(2);
  const Rational quad_coeff(8 - 6 * static_cast<std::int64_t>(n));
  const Rational const_term(6 * static_cast<std::int64_t>(n) * (n - 2));
  const Rational pref = Rational(6) / Rational(static_cast<std::int64_t>(n) * n * n);
  const Rational shift(-2 * binom4(n));
  const Rational inv24 = Rational(1) / Rational(24);

  RationalMatrix d(dim, std::vector<Rational>(dim, Rational(0)));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      Rational scripts = two * (a4[i][j] - b4[i][j]) +
                         two * quad_coeff * (a2[i][j] + b2[i][j]);
      if (i == j) {
        const std::int64_t m = i - n / 2;
        const Rational m2(m * m);
        scripts += Rational(32) * m2 * m2 + Rational(8) * quad_coeff * m2 +
                   const_term;
      }
      d[i][j] = pref * (inv24 * scripts + (i == j ? shift : Rational(0)));
    }

  // Conjugate by the basis norms: G[i][j] = D[i][j] * nu_i / nu_j, with
  // nu_{s+2}/nu_s = (N-s)(N-s-1)/((s+1)(s+2)); then restrict to the grid.
  RationalMatrix g(grid.size(), std::vector<Rational>(grid.size(), Rational(0)));
  for (int gi = 0; gi < grid.size(); ++gi) {
    const int si = grid.s_at(gi);
    for (int gj = 0; gj < grid.size(); ++gj) {
      const int sj = grid.s_at(gj);
      if (d[si][sj].is_zero()) continue;
      Rational ratio(1);
      if (si == sj + 2)
        ratio = Rational(static_cast<std::int64_t>(n - sj) * (n - sj - 1)) /
                Rational(static_cast<std::int64_t>(sj + 1) * (sj + 2));
      else if (si == sj - 2)
        ratio = Rational(static_cast<std::int64_t>(sj) * (sj - 1)) /
                Rational(static_cast<std::int64_t>(n - sj + 1) * (n - sj + 2));
      else if (si != sj)
        throw NumericError(
            "algebra generator: unexpected coupling between s = " +
            std::to_string(si) + " and s = " + std::to_string(sj));
      g[gi][gj] = d[si][sj] * ratio;
    }
  }
  return g;
}

Eigen::MatrixXd build_dot_generator_from_algebra(const DotModel& model,
                                                 const SizeGrid& grid) {
  if (grid.n_fermions() != model.n_fermions)
    throw std::domain_error("build_dot_generator_from_algebra: N mismatch");
  const RationalMatrix g =
      build_dot_generator_from_algebra_rational(model.n_fermions, grid);
  const int dim = grid.size();
  Eigen::MatrixXd out(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      out(i, j) = g[i][j].to_double() * model.coupling;
  return out;
}

}  // namespace chaoslab
