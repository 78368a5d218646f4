#include "chaoslab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "chaoslab/chain.hpp"
#include "chaoslab/dot_generator.hpp"

namespace chaoslab {

namespace {

double default_dt(double j, int n) { return 0.05 / (j * n); }

// Truncation thresholds for the moving active window. Mass leaked per step is
// bounded by edge probability times rate times dt, far below the conservation
// budget.
constexpr double kEdgeGrow = 1e-26;
constexpr double kEdgeDrop = 1e-30;

struct DotWorkspace {
  std::vector<double> up;    // growth rate of grid point i (s -> s+2)
  std::vector<double> down;  // decay rate of grid point i  (s -> s-2)
  std::vector<double> p, k1, k2, k3, k4, tmp;
  int lo = 0, hi = 0;  // active half-open window

  void derivative(const std::vector<double>& src, std::vector<double>& dst) const {
    const int a = lo, b = hi;
    for (int i = a; i < b; ++i) {
      double d = -(up[i] + down[i]) * src[i];
      if (i > a) d += up[i - 1] * src[i - 1];
      if (i + 1 < b) d += down[i + 1] * src[i + 1];
      dst[i] = d;
    }
  }
};

void rk4_step(DotWorkspace& w, double dt) {
  const int a = w.lo, b = w.hi;
  w.derivative(w.p, w.k1);
  for (int i = a; i < b; ++i) w.tmp[i] = w.p[i] + 0.5 * dt * w.k1[i];
  w.derivative(w.tmp, w.k2);
  for (int i = a; i < b; ++i) w.tmp[i] = w.p[i] + 0.5 * dt * w.k2[i];
  w.derivative(w.tmp, w.k3);
  for (int i = a; i < b; ++i) w.tmp[i] = w.p[i] + dt * w.k3[i];
  w.derivative(w.tmp, w.k4);
  for (int i = a; i < b; ++i)
    w.p[i] += dt / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
}

void adapt_window(DotWorkspace& w, int dim) {
  while (w.hi < dim && w.p[w.hi - 1] > kEdgeGrow) ++w.hi;
  while (w.lo > 0 && w.p[w.lo] > kEdgeGrow) --w.lo;
  while (w.hi - w.lo > 8 && w.p[w.hi - 1] < kEdgeDrop && w.p[w.hi - 2] < kEdgeDrop)
    --w.hi;
  while (w.hi - w.lo > 8 && w.p[w.lo] < kEdgeDrop && w.p[w.lo + 1] < kEdgeDrop)
    ++w.lo;
}

void evolve_dot_rk4(const DotModel& model, const SizeDistribution& init,
                    const EvolveConfig& cfg,
                    const std::function<void(double, const std::vector<double>&)>& observe) {
  const SizeGrid& grid = init.grid();
  const int dim = grid.size();
  const double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(model.coupling, model.n_fermions);
  if (dt > 0.1 / (model.coupling * model.n_fermions) + 1e-18)
    throw ConfigError("evolve_dot: dt exceeds the rk4 stability bound 0.1/(J N)");

  DotWorkspace w;
  w.up.resize(dim);
  w.down.resize(dim);
  for (int i = 0; i < dim; ++i) {
    w.up[i] = dot_growth_rate(model, grid.s_at(i));
    w.down[i] = dot_decay_rate(model, grid.s_at(i));
  }
  w.p = init.probs();
  w.k1.assign(dim, 0.0);
  w.k2.assign(dim, 0.0);
  w.k3.assign(dim, 0.0);
  w.k4.assign(dim, 0.0);
  w.tmp.assign(dim, 0.0);

  w.lo = 0;
  w.hi = dim;
  // shrink to the initial support
  while (w.hi - w.lo > 1 && w.p[w.hi - 1] == 0.0) --w.hi;
  while (w.hi - w.lo > 1 && w.p[w.lo] == 0.0) ++w.lo;
  w.lo = std::max(0, w.lo - 4);
  w.hi = std::min(dim, w.hi + 4);

  const auto steps = static_cast<std::int64_t>(std::ceil(cfg.t_max / dt - 1e-12));
  const int stride = std::max(1, cfg.record_stride);

  observe(0.0, w.p);
  double t = 0.0;
  for (std::int64_t step = 0; step < steps; ++step) {
    // the last step is shortened so the trajectory lands exactly on t_max
    const double h = std::min(dt, cfg.t_max - t);
    rk4_step(w, h);
    t = step + 1 == steps ? cfg.t_max : t + h;
    adapt_window(w, dim);
    if ((step + 1) % stride == 0 || step + 1 == steps) {
      double sum = 0.0;
      for (int i = w.lo; i < w.hi; ++i) sum += w.p[i];
      if (std::abs(sum - 1.0) > 1e-6)
        throw NumericError("evolve_dot: conservation drift " +
                           std::to_string(sum - 1.0) + " at t = " +
                           std::to_string(t) + " (dt too large)");
      observe(t, w.p);
    }
  }
}

void evolve_dot_expm(const DotModel& model, const SizeDistribution& init,
                     const EvolveConfig& cfg,
                     const std::function<void(double, const std::vector<double>&)>& observe) {
  const SizeGrid& grid = init.grid();
  const int dim = grid.size();
  if (dim > 4096)
    throw ConfigError("evolve_dot: expm method is limited to 4096 grid points");
  const double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(model.coupling, model.n_fermions);
  const int stride = std::max(1, cfg.record_stride);
  const double dt_rec = dt * stride;

  const Eigen::MatrixXd g = build_dot_generator(model, grid);
  const Eigen::MatrixXd prop = (g * dt_rec).exp();
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(init.probs().data(), dim);

  std::vector<double> buf(init.probs());
  observe(0.0, buf);
  const auto full = static_cast<std::int64_t>(cfg.t_max / dt_rec + 1e-12);
  for (std::int64_t k = 1; k <= full; ++k) {
    p = prop * p;
    Eigen::Map<Eigen::VectorXd>(buf.data(), dim) = p;
    observe(static_cast<double>(k) * dt_rec, buf);
  }
  const double rem = cfg.t_max - static_cast<double>(full) * dt_rec;
  if (rem > 1e-12 * std::max(1.0, cfg.t_max)) {
    p = ((g * rem).exp() * p).eval();
    Eigen::Map<Eigen::VectorXd>(buf.data(), dim) = p;
    observe(cfg.t_max, buf);
  }
}

}  // namespace

void evolve_dot_observe(
    const DotModel& model, const SizeDistribution& init, const EvolveConfig& cfg,
    const std::function<void(double, const std::vector<double>&)>& observe) {
  if (init.grid().n_fermions() != model.n_fermions)
    throw std::domain_error("evolve_dot: grid/model N mismatch");
  if (cfg.t_max < 0.0) throw ConfigError("evolve_dot: t_max must be >= 0");
  if (cfg.method == Integrator::rk4)
    evolve_dot_rk4(model, init, cfg, observe);
  else
    evolve_dot_expm(model, init, cfg, observe);
}

std::vector<std::pair<double, SizeDistribution>> evolve_dot(
    const DotModel& model, const SizeDistribution& init, const EvolveConfig& cfg) {
  std::vector<std::pair<double, SizeDistribution>> out;
  const SizeGrid grid = init.grid();
  evolve_dot_observe(model, init, cfg,
                     [&](double t, const std::vector<double>& p) {
                       std::vector<double> clipped(p);
                       for (double& v : clipped) v = std::max(v, 0.0);
                       out.emplace_back(t, SizeDistribution(grid, clipped));
                     });
  return out;
}

double otoc_moment(const SizeDistribution& dist, int n) {
  if (n < 0) throw std::domain_error("otoc_moment: n must be >= 0");
  const SizeGrid& grid = dist.grid();
  double acc = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    acc += std::pow(grid.xi_at(i), n) * dist.prob_at(i);
  return acc;
}

TimeSeries otoc_curve(const DotModel& model, int r, int n, const EvolveConfig& cfg) {
  if (r < 1 || r > model.n_fermions)
    throw std::domain_error("otoc_curve: need 1 <= r <= N");
  if (n < 1) throw std::domain_error("otoc_curve: need n >= 1");
  const SizeGrid grid(model.n_fermions, r % 2);
  const SizeDistribution init = SizeDistribution::delta_at_s(grid, r);

  std::vector<double> times, values;
  evolve_dot_observe(model, init, cfg,
                     [&](double t, const std::vector<double>& p) {
                       double acc = 0.0;
                       for (int i = 0; i < grid.size(); ++i)
                         acc += std::pow(grid.xi_at(i), n) * p[i];
                       times.push_back(t);
                       values.push_back(acc);
                     });
  return TimeSeries(std::move(times), std::move(values),
                    "F_{" + std::to_string(r) + "," + std::to_string(n) + "}");
}

double generating_function(const SizeDistribution& dist, double nu) {
  if (std::abs(nu) > 700.0)
    throw std::domain_error("generating_function: |nu| > 700 overflows");
  const SizeGrid& grid = dist.grid();
  double acc = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    acc += std::exp(-nu * grid.xi_at(i)) * dist.prob_at(i);
  return acc;
}

ChainStateSpace::ChainStateSpace(const ChainModel& model,
                                 const std::vector<int>& init_sizes)
    : n_(model.n_fermions) {
  if (static_cast<int>(init_sizes.size()) != model.sites)
    throw std::domain_error("ChainStateSpace: init length != L");
  total_ = 1;
  for (int s : init_sizes) {
    if (s < 0 || s > n_)
      throw std::domain_error("ChainStateSpace: initial size outside [0, N]");
    const int parity = s % 2;
    parities_.push_back(parity);
    dims_.push_back((n_ - parity) / 2 + 1);
    strides_.push_back(total_);
    total_ *= dims_.back();
    if (total_ > 2'000'000)
      throw ConfigError("evolve_chain_exact: state space exceeds 2e6 states");
  }
}

std::int64_t ChainStateSpace::encode(const std::vector<int>& sizes) const {
  std::int64_t flat = 0;
  for (std::size_t x = 0; x < dims_.size(); ++x)
    flat += strides_[x] * ((sizes[x] - parities_[x]) / 2);
  return flat;
}

void ChainStateSpace::decode(std::int64_t flat, std::vector<int>& sizes) const {
  sizes.resize(dims_.size());
  for (std::size_t x = 0; x < dims_.size(); ++x) {
    const std::int64_t local = (flat / strides_[x]) % dims_[x];
    sizes[x] = parities_[x] + 2 * static_cast<int>(local);
  }
}

std::vector<double> ChainTrajectory::marginal(int snapshot, int site) const {
  const auto& joint = joints[static_cast<std::size_t>(snapshot)];
  std::vector<double> out(static_cast<std::size_t>(space.site_points(site)), 0.0);
  std::vector<int> sizes;
  for (std::int64_t f = 0; f < space.states(); ++f) {
    space.decode(f, sizes);
    const int local = (sizes[static_cast<std::size_t>(site)] -
                       space.s_of(site, 0)) / 2;
    out[static_cast<std::size_t>(local)] += joint[static_cast<std::size_t>(f)];
  }
  return out;
}

double ChainTrajectory::mean_size(int snapshot, int site) const {
  const std::vector<double> marg = marginal(snapshot, site);
  double acc = 0.0;
  for (std::size_t i = 0; i < marg.size(); ++i)
    acc += marg[i] * space.s_of(site, static_cast<int>(i));
  return acc;
}

ChainTrajectory evolve_chain_exact(const ChainModel& model,
                                   const std::vector<int>& init_sizes,
                                   const EvolveConfig& cfg) {
  ChainStateSpace space(model, init_sizes);
  const std::int64_t dim = space.states();
  const int half = model.n_fermions / 2;

  // Precompute the sparse column structure: out-rates per state.
  struct Column {
    double diag;
    std::vector<std::pair<std::int64_t, double>> out;  // (target, rate)
  };
  std::vector<Column> cols(static_cast<std::size_t>(dim));
  std::vector<int> sizes, m_vec(static_cast<std::size_t>(model.sites));
  for (std::int64_t f = 0; f < dim; ++f) {
    space.decode(f, sizes);
    for (int x = 0; x < model.sites; ++x) m_vec[static_cast<std::size_t>(x)] = sizes[static_cast<std::size_t>(x)] - half;
    const TransitionSet t = chain_all_transitions(model, m_vec);
    Column& c = cols[static_cast<std::size_t>(f)];
    c.diag = t.diagonal;
    for (const auto& mv : t.moves) {
      std::vector<int> target(sizes);
      target[static_cast<std::size_t>(mv.site)] += mv.delta;
      c.out.emplace_back(space.encode(target), mv.rate);
    }
  }

  double max_rate = 0.0;
  for (const auto& c : cols) max_rate = std::max(max_rate, -c.diag);
  const double dt = cfg.dt > 0.0 ? cfg.dt : 0.05 / std::max(max_rate, 1e-300);
  if (max_rate * dt > 2.0)
    throw ConfigError("evolve_chain_exact: dt too large for the fastest rate");

  std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
  p[static_cast<std::size_t>(space.encode(init_sizes))] = 1.0;

  auto derivative = [&](const std::vector<double>& src, std::vector<double>& dst) {
    std::fill(dst.begin(), dst.end(), 0.0);
    for (std::int64_t f = 0; f < dim; ++f) {
      const double pf = src[static_cast<std::size_t>(f)];
      if (pf == 0.0) continue;
      const Column& c = cols[static_cast<std::size_t>(f)];
      dst[static_cast<std::size_t>(f)] += c.diag * pf;
      for (const auto& [target, rate] : c.out)
        dst[static_cast<std::size_t>(target)] += rate * pf;
    }
  };

  ChainTrajectory traj{std::move(space), {}, {}};
  const auto steps = static_cast<std::int64_t>(std::ceil(cfg.t_max / dt - 1e-12));
  const int stride = std::max(1, cfg.record_stride);
  traj.times.push_back(0.0);
  traj.joints.push_back(p);

  std::vector<double> k1(p.size()), k2(p.size()), k3(p.size()), k4(p.size()),
      tmp(p.size());
  for (std::int64_t step = 0; step < steps; ++step) {
    derivative(p, k1);
    for (std::size_t i = 0; i < p.size(); ++i) tmp[i] = p[i] + 0.5 * dt * k1[i];
    derivative(tmp, k2);
    for (std::size_t i = 0; i < p.size(); ++i) tmp[i] = p[i] + 0.5 * dt * k2[i];
    derivative(tmp, k3);
    for (std::size_t i = 0; i < p.size(); ++i) tmp[i] = p[i] + dt * k3[i];
    derivative(tmp, k4);
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if ((step + 1) % stride == 0 || step + 1 == steps) {
      double sum = 0.0;
      for (double v : p) sum += v;
      if (std::abs(sum - 1.0) > 1e-6)
        throw NumericError("evolve_chain_exact: conservation drift at step " +
                           std::to_string(step + 1));
      traj.times.push_back(static_cast<double>(step + 1) * dt);
      traj.joints.push_back(p);
    }
  }
  return traj;
}

}  // namespace chaoslab
