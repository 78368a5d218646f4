#ifndef CHAOSLAB_TYPES_HPP
#define CHAOSLAB_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chaoslab {

// Raised when a run configuration is structurally invalid (bad state-space
// size, step size incompatible with rates, ...). CLI maps this to exit 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a computation fails numerically (conservation drift, quadrature
// non-convergence, degenerate spectrum). CLI maps this to exit 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Single Brownian quantum dot with N Majorana flavors and quartic coupling J.
struct DotModel {
  int n_fermions;   // N, even, >= 4
  double coupling;  // J > 0, units 1/time
  int body_count;   // p, fixed to 4

  DotModel(int n, double j, int p = 4);
};

/// Periodic chain of dots with on-site (J1) and bond (J2) quartic couplings.
struct ChainModel {
  int sites;               // L >= 1, periodic
  int n_fermions;          // N per site, even, >= 4
  double onsite_coupling;  // J1 >= 0
  double bond_coupling;    // J2 >= 0

  ChainModel(int l, int n, double j1, double j2);
};

// Operator-size grid of one dot: integer m in [-N/2, N/2] restricted to one
// parity sector of s = m + N/2. The +-2 transitions never mix sectors.
class SizeGrid {
 public:
  SizeGrid(int n_fermions, int parity);

  int n_fermions() const { return n_; }
  int parity() const { return parity_; }
  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<int>& points() const { return points_; }

  int m_at(int i) const { return points_[static_cast<std::size_t>(i)]; }
  int s_at(int i) const { return m_at(i) + n_ / 2; }
  double xi_at(int i) const { return 2.0 * m_at(i) / n_; }

  bool contains_m(int m) const;
  /// Index of size value m; throws std::domain_error if off-grid.
  int index_of_m(int m) const;
  int index_of_s(int s) const { return index_of_m(s - n_ / 2); }

  bool operator==(const SizeGrid& other) const {
    return n_ == other.n_ && parity_ == other.parity_;
  }

 private:
  int n_;
  int parity_;
  std::vector<int> points_;
};

/// Probability vector over one parity sector of the size grid.
class SizeDistribution {
 public:
  SizeDistribution(SizeGrid grid, std::vector<double> probs);

  /// Delta distribution at size s = m + N/2.
  static SizeDistribution delta_at_s(SizeGrid grid, int s);

  const SizeGrid& grid() const { return grid_; }
  const std::vector<double>& probs() const { return probs_; }
  double prob_at(int i) const { return probs_[static_cast<std::size_t>(i)]; }
  double total() const;

 private:
  SizeGrid grid_;
  std::vector<double> probs_;
};

/// Sampled scalar observable: strictly ascending times plus values.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;

  TimeSeries() = default;
  TimeSeries(std::vector<double> t, std::vector<double> v, std::string lbl);
  std::size_t size() const { return times.size(); }
};

}  // namespace chaoslab

#endif
