#ifndef CHAOSLAB_DOT_GENERATOR_HPP
#define CHAOSLAB_DOT_GENERATOR_HPP

#include <Eigen/Dense>
#include <vector>

#include "chaoslab/rational.hpp"
#include "chaoslab/types.hpp"

namespace chaoslab {

/// Ladder coefficients f_+/f_- of the size-raising/lowering action and the
/// two-step combinations a_1 (raise twice), a_2 (diagonal), a_3 (lower twice).
struct LadderCoeffs {
  double f_plus;
  double f_minus;
  double a1;
  double a2;
  double a3;
};

LadderCoeffs ladder_coeffs(int n_fermions, int m);

/// Master-equation coefficients of one dot: dP(m)/dt = C0[m] P(m)
/// + Cplus[m] P(m+2) + Cminus[m] P(m-2). Values whose neighbor lies outside
/// [-N/2, N/2] are never consumed by callers.
struct DotCoeffs {
  double c0;
  double cplus;
  double cminus;
};

DotCoeffs dot_coeffs(const DotModel& model, int m);

/// Outgoing transition rates of state s = m + N/2 (the generator column in
/// probability space). Both vanish at the grid edges, so the grid closes
/// without special cases; c0 = -(growth + decay) holds exactly.
double dot_growth_rate(const DotModel& model, int s);  // s -> s+2
double dot_decay_rate(const DotModel& model, int s);   // s -> s-2

/// Dense generator G with dP/dt = G P on one parity sector, from the
/// closed-form coefficients.
Eigen::MatrixXd build_dot_generator(const DotModel& model, const SizeGrid& grid);

/// Same generator rebuilt from the ladder-operator algebra: the Liouvillian is
/// assembled by applying the L_x, L_y, L_z action rules to basis states and
/// conjugating by the basis norms. Serves as an anti-typo oracle for
/// dot_coeffs.
Eigen::MatrixXd build_dot_generator_from_algebra(const DotModel& model,
                                                 const SizeGrid& grid);

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Exact-rational variants at J = 1, usable for N <= 64.
RationalMatrix build_dot_generator_rational(int n_fermions, const SizeGrid& grid);
RationalMatrix build_dot_generator_from_algebra_rational(int n_fermions,
                                                         const SizeGrid& grid);

}  // namespace chaoslab

#endif
