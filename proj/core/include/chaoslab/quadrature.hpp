#ifndef CHAOSLAB_QUADRATURE_HPP
#define CHAOSLAB_QUADRATURE_HPP

#include <functional>

namespace chaoslab {

/// Adaptive Gauss-Kronrod (15-point) integration of f over [a, b].
/// Subdivides until the Kronrod error estimate drops below
/// max(abs_tol, rel_tol * |result|); throws NumericError on non-convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-9, double abs_tol = 0.0,
                 int max_intervals = 4000);

/// Integral over [a, inf) via the map x = a + u/(1-u).
double integrate_semi_infinite(const std::function<double(double)>& f, double a,
                               double rel_tol = 1e-9, double abs_tol = 0.0,
                               int max_intervals = 4000);

}  // namespace chaoslab

#endif
