#ifndef CHAOSLAB_STOCHASTIC_HPP
#define CHAOSLAB_STOCHASTIC_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "chaoslab/types.hpp"

namespace chaoslab {

/// 0d diffusion-reaction process: grow m -> m+1 at rate lambda m, decay
/// m -> m-1 at rate lambda m (m-1)/N.
struct DRParams0d {
  double lambda;  // > 0
  int capacity;   // N
  double dt;      // step for fixed-dt mode

  DRParams0d(double lam, int n, double step);
};

/// Branching random walk on the periodic chain: each particle at site x per
/// step dt places offspring locally (lambda dt), on the left (p_l dt) or right
/// (p_r dt) neighbor, or dies (lambda dt (m_x - 1)/N).
struct DRParamsChain {
  double lambda;
  double p_left;
  double p_right;
  int capacity;  // N
  int sites;     // L
  double dt;

  DRParamsChain(double lam, double pl, double pr, int n, int l, double step);
};

/// Monte Carlo state of one trajectory: integer sizes per site (one entry for
/// 0d processes) and the current time. DR walkers keep sizes >= 0; the chain
/// master-equation walker keeps them on the per-site parity grid.
struct LatticeWalker {
  std::vector<long long> sizes;
  double time = 0.0;
};

/// Ensemble statistics of one Monte Carlo run: per-site mean and variance of
/// the raw size at each recorded time, plus a final-time histogram over
/// encoded states where tractable. Identical (seed, trajectory index) pairs
/// give bit-identical trajectories for any worker count.
struct EnsembleStats {
  std::vector<double> times;
  int sites = 1;
  std::vector<std::vector<double>> mean;      // [time][site]
  std::vector<std::vector<double>> variance;  // [time][site], unbiased
  std::int64_t trajectories = 0;
  std::uint64_t seed = 0;
  std::map<std::int64_t, std::int64_t> final_histogram;

  double stderr_mean(int time_index, int site) const;
};

enum class DrMode { fixed_dt, gillespie };

/// 0d diffusion-reaction ensemble from m(0) = m0.
EnsembleStats mc_dot_dr(const DRParams0d& params, int m0, double t_max,
                        std::int64_t ensemble, std::uint64_t seed, DrMode mode,
                        int record_points = 51, int threads = 0);

/// Samples the exact chain master equation with rates from chain_transitions.
/// init_sizes are per-site operator sizes s. fixed_dt is the stated scheme;
/// gillespie is its dt -> 0 oracle. The final histogram encodes per-site sizes
/// in radix N+1 when that fits 63 bits.
EnsembleStats mc_chain_master(const ChainModel& model,
                              const std::vector<int>& init_sizes, double dt,
                              double t_max, std::int64_t ensemble,
                              std::uint64_t seed,
                              DrMode mode = DrMode::fixed_dt,
                              int record_points = 21, int threads = 0);

/// Simplified diffusion-reaction chain: synchronous multinomial updates of
/// all sites per step; offspring are delivered to neighbors within the step.
EnsembleStats mc_dr_chain(const DRParamsChain& params,
                          const std::vector<int>& init_sizes, int steps,
                          std::int64_t ensemble, std::uint64_t seed,
                          int record_stride = 1, int threads = 0);

/// Linear single-mode growth prediction xi_x(n dt) for symmetric hopping
/// p_left = p_right, evaluated by discrete Fourier transform on the periodic
/// lattice. Returns profiles for steps 0..n_steps.
std::vector<std::vector<double>> single_scramblon(const DRParamsChain& params,
                                                  const std::vector<double>& xi0,
                                                  int n_steps);

enum class EmProcess { largeN_det, finiteN_dot };

/// Euler-Maruyama integration of the continuous-region process, time unit
/// 2J = 1: dX = -[2X(1-X^2) + (6/N) X(X^2-1)] dt + sqrt((4/N)(1-X^4)) dB.
/// largeN_det drops the 1/N drift and the noise. Paths are clamped to
/// |x| <= 1 - 1e-9 against rounding overshoot.
EnsembleStats euler_maruyama(EmProcess process, double x0, double dt,
                             double t_max, int n_fermions,
                             std::int64_t ensemble, std::uint64_t seed,
                             int record_points = 51, int threads = 0);

}  // namespace chaoslab

#endif
