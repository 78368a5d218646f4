#ifndef CHAOSLAB_EVOLVE_HPP
#define CHAOSLAB_EVOLVE_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "chaoslab/types.hpp"

namespace chaoslab {

enum class Integrator { rk4, expm };

struct EvolveConfig {
  double t_max = 1.0;
  double dt = 0.0;  // <= 0 picks the default 0.05 / (J N)
  Integrator method = Integrator::rk4;
  int record_stride = 1;
};

/// Time-integrates the dot master equation. Returns (time, distribution)
/// snapshots every record_stride steps, including t = 0 and t = t_max.
std::vector<std::pair<double, SizeDistribution>> evolve_dot(
    const DotModel& model, const SizeDistribution& init,
    const EvolveConfig& cfg);

/// Streaming variant: invokes observe(t, probs) at every recorded step without
/// materializing snapshots. probs is aligned with init.grid().
void evolve_dot_observe(
    const DotModel& model, const SizeDistribution& init,
    const EvolveConfig& cfg,
    const std::function<void(double, const std::vector<double>&)>& observe);

/// n-th moment of the distribution in xi = 2m/N units: sum_m (2m/N)^n P(m).
double otoc_moment(const SizeDistribution& dist, int n);

/// F_{r,n}(t): evolve a delta start at size s = r and record the n-th signed
/// xi-moment. Negative at early times for odd n.
TimeSeries otoc_curve(const DotModel& model, int r, int n,
                      const EvolveConfig& cfg);

/// sum_m exp(-nu 2m/N) P(m); |nu| > 700 overflows double range.
double generating_function(const SizeDistribution& dist, double nu);

/// Product grid of a small chain; per-site parity is fixed by the initial
/// sizes. Flat index runs fastest over site 0.
class ChainStateSpace {
 public:
  ChainStateSpace(const ChainModel& model, const std::vector<int>& init_sizes);

  std::int64_t states() const { return total_; }
  int sites() const { return static_cast<int>(dims_.size()); }
  int site_points(int x) const { return dims_[static_cast<std::size_t>(x)]; }
  int s_of(int x, int local_index) const {
    return parities_[static_cast<std::size_t>(x)] + 2 * local_index;
  }
  std::int64_t encode(const std::vector<int>& sizes) const;
  void decode(std::int64_t flat, std::vector<int>& sizes) const;

 private:
  std::vector<int> parities_;
  std::vector<int> dims_;
  std::vector<std::int64_t> strides_;
  std::int64_t total_;
  int n_;
};

struct ChainTrajectory {
  ChainStateSpace space;
  std::vector<double> times;
  std::vector<std::vector<double>> joints;  // one flat distribution per time

  /// Marginal size distribution of one site at snapshot k.
  std::vector<double> marginal(int snapshot, int site) const;
  /// Mean size s of one site at snapshot k.
  double mean_size(int snapshot, int site) const;
};

/// Exact joint evolution of a small chain from a product of per-site deltas.
/// The state space (points per site)^L is capped at 2e6.
ChainTrajectory evolve_chain_exact(const ChainModel& model,
                                   const std::vector<int>& init_sizes,
                                   const EvolveConfig& cfg);

}  // namespace chaoslab

#endif
