#include "chaoslab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaoslab/quadrature.hpp"

namespace chaoslab {

namespace {

double ipow(double x, int n) {
  double acc = 1.0;
  for (int k = 0; k < n; ++k) acc *= x;
  return acc;
}

// (1/Gamma(alpha)) Int_0^inf y^{alpha-1} e^{-y} (1 + y/z)^{power} dy
// = z^alpha U(alpha, alpha + power + 1, z). The y^{alpha-1} endpoint
// singularity for alpha < 1 is removed by substituting w = y^alpha on [0, 1].
double hyp_u_scaled(double alpha, double power, double z) {
  if (!(alpha > 0.0) || !(z > 0.0))
    throw std::domain_error("tricomi_u: need a > 0 and z > 0");
  const double lg = std::lgamma(alpha);
  auto core = [&](double y) {
    const double le = (alpha - 1.0) * std::log(y) - y +
                      power * std::log1p(y / z) - lg;
    return le < -745.0 ? 0.0 : std::exp(le);
  };
  auto low = [&](double w) {  // y = w^{1/alpha}, dy = y^{1-alpha}/alpha dw
    if (w <= 0.0) return 0.0;
    const double y = std::pow(w, 1.0 / alpha);
    const double le = -y + power * std::log1p(y / z) - lg;
    return (le < -745.0 ? 0.0 : std::exp(le)) / alpha;
  };
  const double i_low = integrate(low, 0.0, 1.0, 1e-10, 1e-300);
  const double i_high = integrate_semi_infinite(core, 1.0, 1e-10, 1e-300);
  return i_low + i_high;
}

}  // namespace

int default_s_star(int n_fermions) { return std::max(100, n_fermions / 100); }

LargeNJob::LargeNJob(int n_f, double j, int r_init, int moment, int crossover)
    : n_fermions(n_f),
      coupling(j),
      r(r_init),
      n(moment),
      s_star(crossover > 0 ? crossover : default_s_star(n_f)) {
  if (n_f < 4) throw std::domain_error("LargeNJob: N too small");
  if (!(j > 0.0)) throw std::domain_error("LargeNJob: J must be > 0");
  if (r < 1 || n < 0) throw std::domain_error("LargeNJob: need r >= 1, n >= 0");
  if (!(r <= s_star && 10 * s_star <= n_fermions))
    throw std::domain_error("LargeNJob: need r <= s_star <= N/10");
}

double xi_large_n(double t, const LargeNJob& job) {
  const double growth =
      4.0 * job.s_star / job.n_fermions * std::exp(8.0 * job.coupling * t);
  return -1.0 / std::sqrt(1.0 + growth);
}

double small_dist_large_n(int r, int s, double t, double coupling) {
  if (r < 1 || s < r) return 0.0;
  if ((s - r) % 2 != 0)
    throw std::domain_error("small_dist_large_n: s and r must share parity");
  if (t < 0.0) throw std::domain_error("small_dist_large_n: t >= 0 required");
  if (t == 0.0) return s == r ? 1.0 : 0.0;
  const double decay = std::expm1(-8.0 * coupling * t);  // e^{-8Jt} - 1
  const double lp = std::lgamma(0.5 * s) - std::lgamma(0.5 * r) -
                    std::lgamma(0.5 * (s - r + 2)) - 4.0 * coupling * r * t +
                    0.5 * (s - r) * std::log(-decay);
  return lp < -745.0 ? 0.0 : std::exp(lp);
}

double flux_large_n(double t, const LargeNJob& job) {
  const double j = job.coupling;
  const double half_star = 0.5 * job.s_star;
  const double le = std::log(8.0 * j) + 0.5 * job.r * std::log(half_star) -
                    std::lgamma(0.5 * job.r) - 4.0 * j * job.r * t -
                    half_star * std::exp(-8.0 * j * t);
  return le < -745.0 ? 0.0 : std::exp(le);
}

double flux_peak_time(const LargeNJob& job) {
  return std::log(static_cast<double>(job.s_star) / job.r) /
         (8.0 * job.coupling);
}

double tricomi_u(double a, double b, double z) {
  return std::exp(-a * std::log(z)) * hyp_u_scaled(a, b - a - 1.0, z);
}

double otoc_large_n(double t, const LargeNJob& job, OtocMode mode) {
  const double j = job.coupling;
  if (mode == OtocMode::closed) {
    const double a = job.n_fermions * std::exp(-8.0 * j * t) / 8.0;
    // -a^{r/2} U(r/2, 1+(r-n)/2, a), evaluated in the scaled form so the
    // a^{r/2} prefactor never materializes.
    return -hyp_u_scaled(0.5 * job.r, -0.5 * job.n, a);
  }
  // Convolution of the small-size flux with the deterministic trajectory.
  const double t_peak = flux_peak_time(job);
  const double t_lo = std::log(job.s_star / 1500.0) / (8.0 * j);
  const double t_hi = t_peak + 45.0 / (4.0 * j * job.r);
  auto integrand = [&](double tp) {
    return flux_large_n(tp, job) * ipow(xi_large_n(t - tp, job), job.n);
  };
  return integrate(integrand, t_lo, t_hi, 1e-9, 1e-14);
}

double size_dist_large_n(double xi, double t, const LargeNJob& job) {
  if (xi < -1.0 || xi > 0.0)
    throw std::domain_error("size_dist_large_n: xi must lie in [-1, 0]");
  if (xi == -1.0 || xi == 0.0) return 0.0;
  const double a = job.n_fermions * std::exp(-8.0 * job.coupling * t) / 8.0;
  const double x = (1.0 - xi * xi) / (xi * xi);
  const double ld = std::log(2.0) + 0.5 * job.r * std::log(a) -
                    std::lgamma(0.5 * job.r) - 3.0 * std::log(-xi) +
                    (0.5 * job.r - 1.0) * std::log(x) - a * x;
  return ld < -745.0 ? 0.0 : std::exp(ld);
}

double rates_finite_n(int s, int n_fermions) {
  if (s < 0) throw std::domain_error("rates_finite_n: s >= 0 required");
  return 2.0 * s * (1.0 - 3.0 * (s + 1.0) / n_fermions);
}

std::vector<XiEpsState> xi_eps_finite_n(const std::vector<double>& t_grid,
                                        int n_fermions, int s_star) {
  if (t_grid.empty()) return {};
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::domain_error("xi_eps_finite_n: t_grid must be ascending");
  if (t_grid.front() < 0.0)
    throw std::domain_error("xi_eps_finite_n: t >= 0 required");

  const double inv_n = 1.0 / n_fermions;
  auto rhs = [&](const XiEpsState& s) {
    XiEpsState d;
    const double xi = s.xi, eps = s.eps;
    d.xi = (2.0 - 6.0 * inv_n) * xi * (xi * xi - 1.0) + 6.0 * eps * xi;
    d.eps = -4.0 * eps * (1.0 - 3.0 * xi * xi) +
            4.0 * inv_n * (1.0 - ipow(xi, 4));
    return d;
  };
  auto rk4 = [&](XiEpsState s, double h) {
    const XiEpsState k1 = rhs(s);
    const XiEpsState k2 = rhs({s.xi + 0.5 * h * k1.xi, s.eps + 0.5 * h * k1.eps});
    const XiEpsState k3 = rhs({s.xi + 0.5 * h * k2.xi, s.eps + 0.5 * h * k2.eps});
    const XiEpsState k4 = rhs({s.xi + h * k3.xi, s.eps + h * k3.eps});
    s.xi += h / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi);
    s.eps += h / 6.0 * (k1.eps + 2.0 * k2.eps + 2.0 * k3.eps + k4.eps);
    return s;
  };

  XiEpsState state{2.0 * s_star * inv_n - 1.0, 0.0};
  std::vector<XiEpsState> out;
  out.reserve(t_grid.size());
  double t = 0.0;
  const double h0 = 5e-4;
  for (double target : t_grid) {
    while (t < target - 1e-15) {
      const double h = std::min(h0, target - t);
      state = rk4(state, h);
      t += h;
      if (!std::isfinite(state.xi) || !std::isfinite(state.eps))
        throw NumericError("xi_eps_finite_n: integration diverged");
    }
    out.push_back(state);
  }
  return out;
}

double otoc_finite_n_prediction(double t, const LargeNJob& job) {
  if (job.r != 1 || job.n != 1)
    throw std::domain_error(
        "otoc_finite_n_prediction: derived for r = n = 1 only");
  const double scale = 1.0 - 6.0 / job.n_fermions;
  return otoc_large_n(scale * t, job, OtocMode::closed);
}

double otoc_finite_n_integral(double t, const LargeNJob& job) {
  if (job.r != 1 || job.n != 1)
    throw std::domain_error("otoc_finite_n_integral: derived for r = n = 1 only");
  const double j = job.coupling;
  const double n = job.n_fermions;
  const double half_star = 0.5 * job.s_star;
  const double a3 = 1.0 - 3.0 / n;
  const double a6 = 1.0 - 6.0 / n;
  const double pref = 8.0 * j * std::sqrt(job.s_star / (2.0 * M_PI));
  auto integrand = [&](double tp) {
    const double le = -half_star * std::exp(-8.0 * j * a3 * tp) -
                      4.0 * j * a6 * tp;
    if (le < -700.0) return 0.0;
    const double xi =
        1.0 / std::sqrt(1.0 + 4.0 * job.s_star / n * std::exp(8.0 * j * a6 * (t - tp)));
    return pref * std::exp(le) * xi;
  };
  const double t_peak = flux_peak_time(job);
  const double t_lo = std::log(job.s_star / 1500.0) / (8.0 * j);
  const double t_hi = t_peak + 45.0 / (4.0 * j);
  return -integrate(integrand, t_lo, t_hi, 1e-9, 1e-14);
}

double size_dist_finite_n(double xi, double t, const LargeNJob& job) {
  const double n = job.n_fermions;
  const double sigma = 1.0 / std::sqrt(n);
  if (xi < -1.0 - 5.0 * sigma || xi > 5.0 * sigma)
    throw std::domain_error("size_dist_finite_n: xi outside smeared support");
  const double t_resc = (1.0 - 6.0 / n) * t;
  const double lo = std::max(-1.0, xi - 8.0 * sigma);
  const double hi = std::min(0.0, xi + 8.0 * sigma);
  if (lo >= hi) return 0.0;
  const double norm = std::sqrt(n / (2.0 * M_PI));
  auto integrand = [&](double xt) {
    const double d = xi - xt;
    return size_dist_large_n(xt, t_resc, job) *
           std::exp(-0.5 * n * d * d);
  };
  return norm * integrate(integrand, lo, hi, 1e-8, 1e-12);
}

double fit_lyapunov_correction(const TimeSeries& exact,
                               const TimeSeries& reference, int n_fermions,
                               double lambda_l, FitWindow window) {
  (void)lambda_l;
  const std::size_t len = reference.size();
  if (exact.size() != len || len < 5)
    throw std::domain_error("fit_lyapunov_correction: series length mismatch");
  for (std::size_t i = 0; i < len; ++i)
    if (std::abs(exact.times[i] - reference.times[i]) > 1e-12)
      throw std::domain_error("fit_lyapunov_correction: time grids differ");

  const double lo = window == FitWindow::early ? 0.85 : 0.01;
  const double hi = window == FitWindow::early ? 0.99 : 0.15;

  // A time rescale t -> (1 - A/N) t gives delta = -(A t/N) dln|F|/dt, so
  // y = N delta / (-dln|F|/dt) is linear in t with slope A. The intercept
  // absorbs the 1/N amplitude renormalization of the growing mode, which is
  // of the same order inside the windows.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int used = 0;
  for (std::size_t i = 1; i + 1 < len; ++i) {
    const double f = std::abs(reference.values[i]);
    if (f < lo || f > hi) continue;
    const double t = reference.times[i];
    if (t <= 0.0) continue;
    const double dlnf =
        (std::log(std::abs(reference.values[i + 1])) -
         std::log(std::abs(reference.values[i - 1]))) /
        (reference.times[i + 1] - reference.times[i - 1]);
    if (dlnf == 0.0) continue;
    const double y = n_fermions *
                     ((exact.values[i] - reference.values[i]) /
                      reference.values[i]) /
                     (-dlnf);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++used;
  }
  const double det = used * stt - st * st;
  if (used < 5 || det == 0.0)
    throw NumericError("fit_lyapunov_correction: window is empty");
  return (used * sty - st * sy) / det;
}

}  // namespace chaoslab
