#ifndef CHAOSLAB_SPECTRUM_HPP
#define CHAOSLAB_SPECTRUM_HPP

#include <vector>

#include "chaoslab/types.hpp"

namespace chaoslab {

/// Eigen decomposition of the lower-bidiagonal small-size generator
/// dP(s)/dt = -f(s) P(s) + f(s-2) P(s-2) on the parity grid
/// s in {s_min, s_min+2, ..., S_max}. Eigenvalues are lambda_h = -f(h); left
/// and right eigenvectors are triangular and normalized to P_h(h) = 1.
/// The alternating left-vector sums lose precision combinatorially, so
/// construction refuses S_max > 41 in double precision.
class BidiagonalSpectrum {
 public:
  /// rates[k] = f(s_min + 2k); f must be strictly increasing (simple spectrum).
  BidiagonalSpectrum(int s_min, std::vector<double> rates);

  int points() const { return static_cast<int>(rates_.size()); }
  int s_min() const { return s_min_; }
  int s_at(int k) const { return s_min_ + 2 * k; }
  double rate_at(int k) const { return rates_[static_cast<std::size_t>(k)]; }
  double eigenvalue(int h_index) const {
    return -rates_[static_cast<std::size_t>(h_index)];
  }
  /// Right eigenvector component P_h(s); zero for s < h.
  double right(int h_index, int s_index) const;
  /// Left eigenvector component \tilde P_h(s); zero for s > h.
  double left(int h_index, int s_index) const;
  /// <\tilde P_h, P_h'> over the grid; delta_{hh'} up to rounding.
  double pairing(int h_index, int hp_index) const;

  /// P_r(s, t) = sum_h \tilde P_h(r) P_h(s) e^{lambda_h t}, accumulated in
  /// extended precision (the terms alternate in sign).
  double reconstruct(int r, int s, double t) const;

 private:
  int s_min_;
  std::vector<double> rates_;
  // built and kept in extended precision; the alternating reconstruction sums
  // cancel heavily
  std::vector<std::vector<long double>> right_;  // [h][s]
  std::vector<std::vector<long double>> left_;   // [h][s]
};

/// Large-N rate table f(s) = 2s (time unit 2J = 1) on the parity grid.
std::vector<double> rates_large_n_table(int s_min, int s_max);

/// 1/N-corrected rate table f(s) = 2s(1 - 3(s+1)/N); refuses s_max beyond the
/// monotonicity window s <= N/6.
std::vector<double> rates_finite_n_table(int s_min, int s_max, int n_fermions);

}  // namespace chaoslab

#endif
