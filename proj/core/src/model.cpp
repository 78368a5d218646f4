#include "chaoslab/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chaoslab {

DotModel::DotModel(int n, double j, int p)
    : n_fermions(n), coupling(j), body_count(p) {
  if (n < 4 || n % 2 != 0)
    throw std::domain_error("DotModel: N must be even and >= 4, got " +
                            std::to_string(n));
  if (!(j > 0.0)) throw std::domain_error("DotModel: J must be > 0");
  if (p != 4)
    throw std::domain_error("DotModel: only p = 4 couplings are supported");
}

ChainModel::ChainModel(int l, int n, double j1, double j2)
    : sites(l), n_fermions(n), onsite_coupling(j1), bond_coupling(j2) {
  // L = 1 wraps onto itself (both neighbors are the site), kept legal so the
  // single-site quartic-rate limit stays testable.
  if (l < 1) throw std::domain_error("ChainModel: L must be >= 1");
  if (n < 4 || n % 2 != 0)
    throw std::domain_error("ChainModel: N must be even and >= 4");
  if (j1 < 0.0 || j2 < 0.0)
    throw std::domain_error("ChainModel: couplings must be >= 0");
}

SizeGrid::SizeGrid(int n_fermions, int parity) : n_(n_fermions), parity_(parity) {
  if (n_ < 4 || n_ % 2 != 0)
    throw std::domain_error("SizeGrid: N must be even and >= 4");
  if (parity != 0 && parity != 1)
    throw std::domain_error("SizeGrid: parity must be 0 or 1");
  for (int s = parity; s <= n_; s += 2) points_.push_back(s - n_ / 2);
}

bool SizeGrid::contains_m(int m) const {
  const int s = m + n_ / 2;
  return s >= 0 && s <= n_ && (s % 2) == parity_;
}

int SizeGrid::index_of_m(int m) const {
  if (!contains_m(m))
    throw std::domain_error("SizeGrid: m = " + std::to_string(m) +
                            " is not on this grid");
  return (m + n_ / 2 - parity_) / 2;
}

SizeDistribution::SizeDistribution(SizeGrid grid, std::vector<double> probs)
    : grid_(std::move(grid)), probs_(std::move(probs)) {
  if (probs_.size() != static_cast<std::size_t>(grid_.size()))
    throw std::domain_error("SizeDistribution: length mismatch with grid");
  constexpr double tol_neg = 1e-12;
  double sum = 0.0;
  for (double p : probs_) {
    if (p < -tol_neg)
      throw std::domain_error("SizeDistribution: negative probability " +
                              std::to_string(p));
    sum += p;
  }
  if (!(sum > 0.0))
    throw std::domain_error("SizeDistribution: total probability is zero");
  if (std::abs(sum - 1.0) > 1e-9) {
    for (double& p : probs_) p /= sum;
  }
}

SizeDistribution SizeDistribution::delta_at_s(SizeGrid grid, int s) {
  std::vector<double> p(static_cast<std::size_t>(grid.size()), 0.0);
  p[static_cast<std::size_t>(grid.index_of_s(s))] = 1.0;
  return SizeDistribution(std::move(grid), std::move(p));
}

double SizeDistribution::total() const {
  return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

TimeSeries::TimeSeries(std::vector<double> t, std::vector<double> v,
                       std::string lbl)
    : times(std::move(t)), values(std::move(v)), label(std::move(lbl)) {
  if (times.size() != values.size())
    throw std::domain_error("TimeSeries: times/values length mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::domain_error("TimeSeries: times must be strictly ascending");
}

}  // namespace chaoslab
