#ifndef CHAOSLAB_ANALYTICS_HPP
#define CHAOSLAB_ANALYTICS_HPP

#include <vector>

#include "chaoslab/types.hpp"

namespace chaoslab {

/// Parameters of one large-N analytic computation. The crossover size s_star
/// separates the discrete small-size region from the deterministic continuous
/// region; results must not depend on it.
struct LargeNJob {
  int n_fermions;
  double coupling;  // J, explicit; formulas quoted at 2J = 1 are rescaled
  int r;            // initial operator size
  int n;            // moment order
  int s_star;       // crossover, 1 << s_star << N

  LargeNJob(int n_f, double j, int r_init, int moment, int crossover = 0);
};

/// Default crossover max(100, N/100).
int default_s_star(int n_fermions);

/// Deterministic continuous-region trajectory started at the crossover:
/// xi(t) = -1/sqrt(1 + (4 s*/N) e^{8Jt}).
double xi_large_n(double t, const LargeNJob& job);

/// Closed-form small-size distribution P_r(s, t) in the large-N limit.
double small_dist_large_n(int r, int s, double t, double coupling);

/// Flux density leaving the small-size region; normalized to 1 over all t.
double flux_large_n(double t, const LargeNJob& job);

/// Flux peak time ln(s*/r) / (8J).
double flux_peak_time(const LargeNJob& job);

/// Tricomi confluent hypergeometric U(a, b, z) for a > 0, z > 0, by adaptive
/// quadrature of the integral representation; relative error ~1e-8.
double tricomi_u(double a, double b, double z);

enum class OtocMode { integral, closed };

/// Large-N OTOC F_{r,n}(t). closed: -a^{r/2} U(r/2, 1+(r-n)/2, a) with
/// a = N e^{-8Jt}/8. integral: the flux/trajectory convolution at the job's
/// s_star (s_star-independence is the internal consistency check). The closed
/// form carries the overall minus sign of the generating-function route; the
/// integral mode is signed like the xi^n moment. Compare magnitudes.
double otoc_large_n(double t, const LargeNJob& job, OtocMode mode);

/// Large-N size density over xi in (-1, 0); integrates to 1. Exact endpoints
/// return 0 (measure-zero convention).
double size_dist_large_n(double xi, double t, const LargeNJob& job);

/// 1/N-corrected small-size rate f(s) = 2s(1 - 3(s+1)/N), time unit 2J = 1.
double rates_finite_n(int s, int n_fermions);

/// Gaussian wave-packet state of the continuous region.
struct XiEpsState {
  double xi;
  double eps;
};

/// RK4 solution of the coupled (xi, eps) equations with 1/N terms, time unit
/// 2J = 1, from xi(0) = 2 s*/N - 1, eps(0) = 0. t_grid must be ascending.
std::vector<XiEpsState> xi_eps_finite_n(const std::vector<double>& t_grid,
                                        int n_fermions, int s_star);

/// Leading 1/N OTOC prediction for r = n = 1: the large-N closed form at
/// rescaled time (1 - 6/N) t.
double otoc_finite_n_prediction(double t, const LargeNJob& job);

/// Direct evaluation of the smeared 1/N flux integral for r = n = 1; agrees
/// with otoc_finite_n_prediction within 1% at N = 1e5.
double otoc_finite_n_integral(double t, const LargeNJob& job);

/// 1/N size density: Gaussian smear (width 1/sqrt(N)) of the time-rescaled
/// large-N density. Support extends slightly past the large-N edges.
double size_dist_finite_n(double xi, double t, const LargeNJob& job);

enum class FitWindow { early, late };

/// Rescaling coefficient of the relative OTOC deviation (A for the early
/// window |F| in [0.85, 0.99], B for the late window |F| in [0.01, 0.15]):
/// least-squares slope in t of N (exact - ref)/ref / (-dln|ref|/dt), with an
/// intercept absorbing the same-order amplitude renormalization.
double fit_lyapunov_correction(const TimeSeries& exact,
                               const TimeSeries& reference, int n_fermions,
                               double lambda_l, FitWindow window);

}  // namespace chaoslab

#endif
