#include "chaoslab/spectrum.hpp"

#include <cmath>
#include <string>

#include "chaoslab/analytics.hpp"

namespace chaoslab {

BidiagonalSpectrum::BidiagonalSpectrum(int s_min, std::vector<double> rates)
    : s_min_(s_min), rates_(std::move(rates)) {
  if (s_min < 0) throw std::domain_error("BidiagonalSpectrum: s_min >= 0");
  if (rates_.empty()) throw std::domain_error("BidiagonalSpectrum: empty rates");
  const int s_max = s_min_ + 2 * (points() - 1);
  if (s_max > 41)
    throw ConfigError(
        "BidiagonalSpectrum: S_max = " + std::to_string(s_max) +
        " > 41; the alternating eigen sums are unreliable in double");
  for (int k = 1; k < points(); ++k)
    if (!(rates_[static_cast<std::size_t>(k)] >
          rates_[static_cast<std::size_t>(k - 1)]))
      throw NumericError("BidiagonalSpectrum: rates must increase strictly "
                         "(degenerate spectrum)");

  const int dim = points();
  right_.assign(static_cast<std::size_t>(dim),
                std::vector<long double>(static_cast<std::size_t>(dim), 0.0L));
  left_.assign(static_cast<std::size_t>(dim),
               std::vector<long double>(static_cast<std::size_t>(dim), 0.0L));
  for (int h = 0; h < dim; ++h) {
    const long double fh = rates_[static_cast<std::size_t>(h)];
    right_[h][h] = 1.0L;
    for (int s = h + 1; s < dim; ++s)
      right_[h][s] = right_[h][s - 1] *
                     static_cast<long double>(rates_[static_cast<std::size_t>(s - 1)]) /
                     (rates_[static_cast<std::size_t>(s)] - fh);
    left_[h][h] = 1.0L;
    for (int s = h - 1; s >= 0; --s)
      left_[h][s] = left_[h][s + 1] *
                    static_cast<long double>(rates_[static_cast<std::size_t>(s)]) /
                    (rates_[static_cast<std::size_t>(s)] - fh);
  }
}

double BidiagonalSpectrum::right(int h_index, int s_index) const {
  return static_cast<double>(right_[static_cast<std::size_t>(h_index)]
                                   [static_cast<std::size_t>(s_index)]);
}

double BidiagonalSpectrum::left(int h_index, int s_index) const {
  return static_cast<double>(left_[static_cast<std::size_t>(h_index)]
                                  [static_cast<std::size_t>(s_index)]);
}

double BidiagonalSpectrum::pairing(int h_index, int hp_index) const {
  long double acc = 0.0L;
  for (int s = 0; s < points(); ++s)
    acc += left_[static_cast<std::size_t>(h_index)][static_cast<std::size_t>(s)] *
           right_[static_cast<std::size_t>(hp_index)][static_cast<std::size_t>(s)];
  return static_cast<double>(acc);
}

double BidiagonalSpectrum::reconstruct(int r, int s, double t) const {
  if ((r - s_min_) % 2 != 0 || (s - s_min_) % 2 != 0)
    throw std::domain_error("BidiagonalSpectrum: r, s must be on the grid");
  const int ri = (r - s_min_) / 2;
  const int si = (s - s_min_) / 2;
  if (ri < 0 || ri >= points() || si < 0 || si >= points())
    throw std::domain_error("BidiagonalSpectrum: r or s outside the table");
  long double acc = 0.0L;
  for (int h = ri; h <= si; ++h)
    acc += left_[static_cast<std::size_t>(h)][static_cast<std::size_t>(ri)] *
           right_[static_cast<std::size_t>(h)][static_cast<std::size_t>(si)] *
           std::exp(static_cast<long double>(eigenvalue(h)) * t);
  return static_cast<double>(acc);
}

std::vector<double> rates_large_n_table(int s_min, int s_max) {
  std::vector<double> f;
  for (int s = s_min; s <= s_max; s += 2) f.push_back(2.0 * s);
  return f;
}

std::vector<double> rates_finite_n_table(int s_min, int s_max, int n_fermions) {
  if (6 * s_max > n_fermions)
    throw std::domain_error(
        "rates_finite_n_table: s_max beyond the monotone window s <= N/6");
  std::vector<double> f;
  for (int s = s_min; s <= s_max; s += 2)
    f.push_back(rates_finite_n(s, n_fermions));
  return f;
}

}  // namespace chaoslab
