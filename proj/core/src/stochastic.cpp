#include "chaoslab/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include "chaoslab/chain.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("CHAOS_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

constexpr std::int64_t kBlock = 64;

// Runs `ensemble` trajectories with per-trajectory Philox streams.
// Trajectories are grouped into fixed blocks; block partial sums are reduced
// in block order, so results do not depend on the worker count.
// fn fills values[t * sites + x] at every checkpoint and returns a histogram
// key for the final state (or -1 to skip).
EnsembleStats run_ensemble(
    std::int64_t ensemble, std::uint64_t seed, int threads,
    const std::vector<double>& times, int sites, bool want_hist,
    const std::function<std::int64_t(std::int64_t, Philox&,
                                     std::vector<double>&)>& fn) {
  if (ensemble < 1) throw ConfigError("ensemble size must be >= 1");
  const int n_times = static_cast<int>(times.size());
  const std::int64_t n_blocks = (ensemble + kBlock - 1) / kBlock;
  const std::size_t cells = static_cast<std::size_t>(n_times) * sites;

  std::vector<std::vector<double>> block_sum(static_cast<std::size_t>(n_blocks));
  std::vector<std::vector<double>> block_sumsq(static_cast<std::size_t>(n_blocks));
  std::map<std::int64_t, std::int64_t> hist;
  std::mutex hist_mutex;
  std::atomic<std::int64_t> next_block{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&]() {
    std::vector<double> values(cells);
    std::map<std::int64_t, std::int64_t> local_hist;
    try {
      for (;;) {
        const std::int64_t b = next_block.fetch_add(1);
        if (b >= n_blocks) break;
        auto& sum = block_sum[static_cast<std::size_t>(b)];
        auto& sumsq = block_sumsq[static_cast<std::size_t>(b)];
        sum.assign(cells, 0.0);
        sumsq.assign(cells, 0.0);
        const std::int64_t begin = b * kBlock;
        const std::int64_t end = std::min(ensemble, begin + kBlock);
        for (std::int64_t traj = begin; traj < end; ++traj) {
          Philox gen(seed, static_cast<std::uint64_t>(traj));
          const std::int64_t key = fn(traj, gen, values);
          for (std::size_t i = 0; i < cells; ++i) {
            sum[i] += values[i];
            sumsq[i] += values[i] * values[i];
          }
          if (want_hist && key >= 0) ++local_hist[key];
        }
      }
      if (want_hist && !local_hist.empty()) {
        std::lock_guard<std::mutex> lock(hist_mutex);
        for (const auto& [k, v] : local_hist) hist[k] += v;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  const int n_threads = static_cast<int>(
      std::max<std::int64_t>(1, std::min<std::int64_t>(resolve_threads(threads), n_blocks)));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  EnsembleStats stats;
  stats.times = times;
  stats.sites = sites;
  stats.trajectories = ensemble;
  stats.seed = seed;
  stats.mean.assign(static_cast<std::size_t>(n_times),
                    std::vector<double>(static_cast<std::size_t>(sites), 0.0));
  stats.variance = stats.mean;
  std::vector<double> sum(cells, 0.0), sumsq(cells, 0.0);
  for (std::int64_t b = 0; b < n_blocks; ++b)
    for (std::size_t i = 0; i < cells; ++i) {
      sum[i] += block_sum[static_cast<std::size_t>(b)][i];
      sumsq[i] += block_sumsq[static_cast<std::size_t>(b)][i];
    }
  const double n = static_cast<double>(ensemble);
  for (int t = 0; t < n_times; ++t)
    for (int x = 0; x < sites; ++x) {
      const std::size_t i = static_cast<std::size_t>(t) * sites + x;
      const double mu = sum[i] / n;
      stats.mean[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)] = mu;
      stats.variance[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)] =
          ensemble > 1 ? std::max(0.0, (sumsq[i] - n * mu * mu) / (n - 1.0))
                       : 0.0;
    }
  stats.final_histogram = std::move(hist);
  return stats;
}

std::vector<double> checkpoint_times(double t_max, int points) {
  if (points < 2) points = 2;
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) t[static_cast<std::size_t>(k)] = t_max * k / (points - 1);
  return t;
}

}  // namespace

DRParams0d::DRParams0d(double lam, int n, double step)
    : lambda(lam), capacity(n), dt(step) {
  if (!(lam > 0.0)) throw std::domain_error("DRParams0d: lambda must be > 0");
  if (n < 1) throw std::domain_error("DRParams0d: capacity must be >= 1");
  if (!(step > 0.0)) throw std::domain_error("DRParams0d: dt must be > 0");
}

DRParamsChain::DRParamsChain(double lam, double pl, double pr, int n, int l,
                             double step)
    : lambda(lam), p_left(pl), p_right(pr), capacity(n), sites(l), dt(step) {
  if (!(lam > 0.0)) throw std::domain_error("DRParamsChain: lambda must be > 0");
  if (pl < 0.0 || pr < 0.0)
    throw std::domain_error("DRParamsChain: hop rates must be >= 0");
  if (n < 1 || l < 1)
    throw std::domain_error("DRParamsChain: capacity and sites must be >= 1");
  if (!(step > 0.0)) throw std::domain_error("DRParamsChain: dt must be > 0");
}

double EnsembleStats::stderr_mean(int time_index, int site) const {
  const double var = variance[static_cast<std::size_t>(time_index)]
                             [static_cast<std::size_t>(site)];
  return std::sqrt(var / static_cast<double>(trajectories));
}

EnsembleStats mc_dot_dr(const DRParams0d& params, int m0, double t_max,
                        std::int64_t ensemble, std::uint64_t seed, DrMode mode,
                        int record_points, int threads) {
  if (m0 < 0) throw std::domain_error("mc_dot_dr: m0 must be >= 0");
  const double lam = params.lambda;
  const double n_cap = params.capacity;
  const std::vector<double> times = checkpoint_times(t_max, record_points);

  if (mode == DrMode::fixed_dt) {
    // Mean-field reachable maximum over [0, t_max] plus fluctuation headroom.
    const double xi0 = static_cast<double>(m0) / n_cap;
    const double gr = std::exp(std::min(lam * t_max, 700.0));
    const double xi_end = xi0 > 0.0 ? xi0 * gr / (1.0 + xi0 * (gr - 1.0)) : 0.0;
    const double m_ref =
        n_cap * xi_end + 1.0 + 6.0 * std::sqrt(n_cap * xi_end + m0 + 1.0);
    if (lam * params.dt * m_ref >= 0.1)
      throw ConfigError("mc_dot_dr: lambda dt m exceeds 0.1 for reachable m = " +
                        std::to_string(static_cast<long long>(m_ref)));
    const auto steps = static_cast<std::int64_t>(std::ceil(t_max / params.dt - 1e-9));
    std::vector<std::int64_t> marks(times.size());
    for (std::size_t k = 0; k < times.size(); ++k)
      marks[k] = std::min<std::int64_t>(
          steps, std::llround(times[k] / params.dt));

    auto traj = [&](std::int64_t, Philox& gen, std::vector<double>& out) {
      long long m = m0;
      std::size_t mark = 0;
      for (std::int64_t step = 0; step <= steps; ++step) {
        while (mark < marks.size() && marks[mark] == step)
          out[mark++] = static_cast<double>(m);
        if (step == steps) break;
        const double p_grow = lam * static_cast<double>(m) * params.dt;
        const double p_decay =
            lam * static_cast<double>(m) * (m - 1.0) / n_cap * params.dt;
        if (p_grow + p_decay > 1.0)
          throw ConfigError("mc_dot_dr: step probability overflow at m = " +
                            std::to_string(m));
        const double u = rng::uniform(gen);
        if (u < p_grow)
          ++m;
        else if (u < p_grow + p_decay)
          --m;
      }
      return m;
    };
    return run_ensemble(ensemble, seed, threads, times, 1, true, traj);
  }

  auto traj = [&](std::int64_t, Philox& gen, std::vector<double>& out) {
    long long m = m0;
    double t = 0.0;
    std::size_t mark = 0;
    while (mark < times.size()) {
      const double rate_g = lam * static_cast<double>(m);
      const double rate_d = lam * static_cast<double>(m) * (m - 1.0) / n_cap;
      const double total = rate_g + rate_d;
      const double t_next = total > 0.0
                                ? t + rng::exponential(gen, total)
                                : std::numeric_limits<double>::infinity();
      while (mark < times.size() && times[mark] <= t_next)
        out[mark++] = static_cast<double>(m);
      if (t_next > t_max || !std::isfinite(t_next)) break;
      t = t_next;
      if (rng::uniform(gen) * total < rate_g)
        ++m;
      else
        --m;
    }
    return m;
  };
  return run_ensemble(ensemble, seed, threads, times, 1, true, traj);
}

EnsembleStats mc_chain_master(const ChainModel& model,
                              const std::vector<int>& init_sizes, double dt,
                              double t_max, std::int64_t ensemble,
                              std::uint64_t seed, DrMode mode,
                              int record_points, int threads) {
  const int l = model.sites;
  const int n = model.n_fermions;
  if (static_cast<int>(init_sizes.size()) != l)
    throw std::domain_error("mc_chain_master: init length != L");
  for (int s : init_sizes)
    if (s < 0 || s > n)
      throw std::domain_error("mc_chain_master: initial size outside [0, N]");
  const std::vector<double> times = checkpoint_times(t_max, record_points);

  // Joint-state histogram key in radix N+1, when it fits.
  const bool encodable = l * std::log2(n + 1.0) < 62.0;
  auto encode = [&](const std::vector<int>& s) {
    if (!encodable) return static_cast<std::int64_t>(-1);
    std::int64_t key = 0;
    for (int x = l - 1; x >= 0; --x)
      key = key * (n + 1) + s[static_cast<std::size_t>(x)];
    return key;
  };

  const int half = n / 2;
  auto traj = [&](std::int64_t, Philox& gen, std::vector<double>& out) {
    std::vector<int> s(init_sizes);
    std::vector<int> m(static_cast<std::size_t>(l));
    std::vector<double> up(static_cast<std::size_t>(l)), down(static_cast<std::size_t>(l));
    auto refresh = [&]() {
      double total = 0.0;
      for (int x = 0; x < l; ++x) m[static_cast<std::size_t>(x)] = s[static_cast<std::size_t>(x)] - half;
      for (int x = 0; x < l; ++x) {
        const SiteUpDown r = chain_site_updown(model, m, x);
        up[static_cast<std::size_t>(x)] = r.up;
        down[static_cast<std::size_t>(x)] = r.down;
        total += r.up + r.down;
      }
      return total;
    };

    std::size_t mark = 0;
    if (mode == DrMode::fixed_dt) {
      const auto steps = static_cast<std::int64_t>(std::ceil(t_max / dt - 1e-9));
      std::vector<std::int64_t> marks(times.size());
      for (std::size_t k = 0; k < times.size(); ++k)
        marks[k] = std::min<std::int64_t>(steps, std::llround(times[k] / dt));
      for (std::int64_t step = 0; step <= steps; ++step) {
        while (mark < marks.size() && marks[mark] == step) {
          for (int x = 0; x < l; ++x)
            out[mark * static_cast<std::size_t>(l) + static_cast<std::size_t>(x)] =
                static_cast<double>(s[static_cast<std::size_t>(x)]);
          ++mark;
        }
        if (step == steps) break;
        const double total = refresh();
        if (total * dt > 0.1) {
          std::string state;
          for (int x = 0; x < l; ++x)
            state += (x ? "," : "") + std::to_string(s[static_cast<std::size_t>(x)]);
          throw ConfigError("mc_chain_master: rate*dt = " +
                            std::to_string(total * dt) +
                            " > 0.1 at state s = (" + state + ")");
        }
        // Synchronous step: decide every move against the pre-step state.
        int fired_site[64];
        int fired_delta[64];
        int fired = 0;
        for (int x = 0; x < l; ++x) {
          if (rng::uniform(gen) < up[static_cast<std::size_t>(x)] * dt) {
            fired_site[fired] = x;
            fired_delta[fired++] = +2;
          }
          if (rng::uniform(gen) < down[static_cast<std::size_t>(x)] * dt) {
            fired_site[fired] = x;
            fired_delta[fired++] = -2;
          }
        }
        for (int k = 0; k < fired; ++k)
          s[static_cast<std::size_t>(fired_site[k])] += fired_delta[k];
      }
    } else {
      double t = 0.0;
      for (;;) {
        const double total = refresh();
        const double t_next =
            total > 0.0 ? t + rng::exponential(gen, total)
                        : std::numeric_limits<double>::infinity();
        while (mark < times.size() && times[mark] <= t_next) {
          for (int x = 0; x < l; ++x)
            out[mark * static_cast<std::size_t>(l) + static_cast<std::size_t>(x)] =
                static_cast<double>(s[static_cast<std::size_t>(x)]);
          ++mark;
        }
        if (mark >= times.size() || t_next > t_max || !std::isfinite(t_next))
          break;
        t = t_next;
        double pick = rng::uniform(gen) * total;
        for (int x = 0; x < l; ++x) {
          if (pick < up[static_cast<std::size_t>(x)]) {
            s[static_cast<std::size_t>(x)] += 2;
            break;
          }
          pick -= up[static_cast<std::size_t>(x)];
          if (pick < down[static_cast<std::size_t>(x)]) {
            s[static_cast<std::size_t>(x)] -= 2;
            break;
          }
          pick -= down[static_cast<std::size_t>(x)];
        }
      }
    }
    return encode(s);
  };
  if (mode == DrMode::fixed_dt && l > 32)
    throw ConfigError("mc_chain_master: fixed-dt sampler supports L <= 32");
  return run_ensemble(ensemble, seed, threads, times, l, encodable, traj);
}

EnsembleStats mc_dr_chain(const DRParamsChain& params,
                          const std::vector<int>& init_sizes, int steps,
                          std::int64_t ensemble, std::uint64_t seed,
                          int record_stride, int threads) {
  const int l = params.sites;
  if (static_cast<int>(init_sizes.size()) != l)
    throw std::domain_error("mc_dr_chain: init length != L");
  for (int m : init_sizes)
    if (m < 0) throw std::domain_error("mc_dr_chain: sizes must be >= 0");
  if (steps < 1) throw std::domain_error("mc_dr_chain: steps must be >= 1");
  record_stride = std::max(1, record_stride);

  // Multinomial validity at the saturated mean plus fluctuation headroom.
  const double m_ref =
      params.capacity * (1.0 + (params.p_left + params.p_right) / params.lambda) +
      6.0 * std::sqrt(static_cast<double>(params.capacity)) + 1.0;
  const double worst = (params.lambda + params.p_left + params.p_right +
                        params.lambda * (m_ref - 1.0) / params.capacity) *
                       params.dt;
  if (worst > 1.0)
    throw ConfigError("mc_dr_chain: event probabilities exceed 1 at reachable "
                      "m = " + std::to_string(static_cast<long long>(m_ref)));

  std::vector<double> times;
  for (int k = 0; k <= steps; ++k)
    if (k % record_stride == 0 || k == steps)
      times.push_back(params.dt * k);

  const double pl = params.p_left * params.dt;
  const double pr = params.p_right * params.dt;
  const double pb = params.lambda * params.dt;

  auto traj = [&](std::int64_t, Philox& gen, std::vector<double>& out) {
    LatticeWalker walker{{init_sizes.begin(), init_sizes.end()}, 0.0};
    std::vector<long long>& m = walker.sizes;
    std::vector<long long> next(m.size());
    std::size_t mark = 0;
    for (int step = 0; step <= steps; ++step) {
      walker.time = params.dt * step;
      if (step % record_stride == 0 || step == steps) {
        for (int x = 0; x < l; ++x)
          out[mark * static_cast<std::size_t>(l) + static_cast<std::size_t>(x)] =
              static_cast<double>(m[static_cast<std::size_t>(x)]);
        ++mark;
      }
      if (step == steps) break;
      std::copy(m.begin(), m.end(), next.begin());
      for (int x = 0; x < l; ++x) {
        const long long mx = m[static_cast<std::size_t>(x)];
        if (mx == 0) continue;
        const double pd = pb * (mx - 1.0) / params.capacity;
        if (pl + pr + pb + pd > 1.0)
          throw ConfigError("mc_dr_chain: event probabilities exceed 1 at m = " +
                            std::to_string(mx));
        // Multinomial via conditional binomials: left, right, birth, death.
        long long rest = mx;
        double tail = 1.0;
        const long long n_l = rng::binomial(gen, rest, pl / tail);
        rest -= n_l;
        tail -= pl;
        const long long n_r = rng::binomial(gen, rest, pr / tail);
        rest -= n_r;
        tail -= pr;
        const long long n_b = rng::binomial(gen, rest, pb / tail);
        rest -= n_b;
        tail -= pb;
        const long long n_d = rng::binomial(gen, rest, pd / tail);
        next[static_cast<std::size_t>(x)] += n_b - n_d;
        next[static_cast<std::size_t>((x - 1 + l) % l)] += n_l;
        next[static_cast<std::size_t>((x + 1) % l)] += n_r;
      }
      std::swap(m, next);
      for (long long v : m)
        if (v < 0)
          throw std::logic_error("mc_dr_chain: negative site size (internal)");
    }
    return static_cast<std::int64_t>(-1);
  };
  return run_ensemble(ensemble, seed, threads, times, l, false, traj);
}

std::vector<std::vector<double>> single_scramblon(const DRParamsChain& params,
                                                  const std::vector<double>& xi0,
                                                  int n_steps) {
  if (params.p_left != params.p_right)
    throw std::domain_error("single_scramblon: requires p_left == p_right");
  const int l = params.sites;
  if (static_cast<int>(xi0.size()) != l)
    throw std::domain_error("single_scramblon: profile length != L");
  if (n_steps < 0) throw std::domain_error("single_scramblon: n_steps >= 0");

  const double lam_dt = params.lambda * params.dt;
  const double p_dt = params.p_left * params.dt;
  const double two_pi = 6.283185307179586476925287;

  // Mode amplitudes xi_k(0) and per-step growth factors.
  std::vector<double> re(static_cast<std::size_t>(l)), im(static_cast<std::size_t>(l)),
      growth(static_cast<std::size_t>(l));
  for (int j = 0; j < l; ++j) {
    double r = 0.0, i = 0.0;
    for (int x = 0; x < l; ++x) {
      const double phase = -two_pi * j * x / l;
      r += xi0[static_cast<std::size_t>(x)] * std::cos(phase);
      i += xi0[static_cast<std::size_t>(x)] * std::sin(phase);
    }
    re[static_cast<std::size_t>(j)] = r;
    im[static_cast<std::size_t>(j)] = i;
    growth[static_cast<std::size_t>(j)] =
        1.0 + lam_dt + 2.0 * p_dt * std::cos(two_pi * j / l);
  }

  std::vector<std::vector<double>> out(static_cast<std::size_t>(n_steps + 1),
                                       std::vector<double>(static_cast<std::size_t>(l), 0.0));
  for (int step = 0; step <= n_steps; ++step) {
    for (int x = 0; x < l; ++x) {
      double acc = 0.0;
      for (int j = 0; j < l; ++j) {
        const double phase = two_pi * j * x / l;
        acc += re[static_cast<std::size_t>(j)] * std::cos(phase) -
               im[static_cast<std::size_t>(j)] * std::sin(phase);
      }
      out[static_cast<std::size_t>(step)][static_cast<std::size_t>(x)] = acc / l;
    }
    if (step < n_steps)
      for (int j = 0; j < l; ++j) {
        re[static_cast<std::size_t>(j)] *= growth[static_cast<std::size_t>(j)];
        im[static_cast<std::size_t>(j)] *= growth[static_cast<std::size_t>(j)];
      }
  }
  return out;
}

EnsembleStats euler_maruyama(EmProcess process, double x0, double dt,
                             double t_max, int n_fermions,
                             std::int64_t ensemble, std::uint64_t seed,
                             int record_points, int threads) {
  if (!(x0 > -1.0 && x0 < 1.0))
    throw std::domain_error("euler_maruyama: x0 must lie in (-1, 1)");
  if (!(dt > 0.0) || dt > 1e-3)
    throw ConfigError("euler_maruyama: need 0 < dt <= 1e-3");
  if (process == EmProcess::finiteN_dot && n_fermions < 4)
    throw std::domain_error("euler_maruyama: N required for finiteN_dot");

  const auto steps = static_cast<std::int64_t>(std::ceil(t_max / dt - 1e-9));
  std::vector<double> times = checkpoint_times(t_max, record_points);
  std::vector<std::int64_t> marks(times.size());
  for (std::size_t k = 0; k < times.size(); ++k)
    marks[k] = std::min<std::int64_t>(steps, std::llround(times[k] / dt));

  const double inv_n = process == EmProcess::finiteN_dot ? 1.0 / n_fermions : 0.0;
  const double sqrt_dt = std::sqrt(dt);
  const double clamp = 1.0 - 1e-9;

  auto traj = [&](std::int64_t, Philox& gen, std::vector<double>& out) {
    double x = x0;
    std::size_t mark = 0;
    for (std::int64_t step = 0; step <= steps; ++step) {
      while (mark < marks.size() && marks[mark] == step) out[mark++] = x;
      if (step == steps) break;
      const double drift = -(2.0 - 6.0 * inv_n) * x * (1.0 - x * x);
      double dx = drift * dt;
      if (inv_n > 0.0) {
        const double var = 4.0 * inv_n * (1.0 - x * x * x * x);
        if (var > 0.0) dx += std::sqrt(var) * sqrt_dt * rng::normal(gen);
      }
      x += dx;
      x = std::clamp(x, -clamp, clamp);
    }
    return static_cast<std::int64_t>(-1);
  };
  return run_ensemble(ensemble, seed, threads, times, 1, false, traj);
}

}  // namespace chaoslab
