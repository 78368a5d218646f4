#ifndef CHAOSLAB_TESTS_SUPPORT_STATS_HPP
#define CHAOSLAB_TESTS_SUPPORT_STATS_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace teststats {

// Regularized upper incomplete gamma Q(a, x): series for x < a+1, continued
// fraction otherwise.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi2_survival(double stat, int dof) {
  return gamma_q(0.5 * dof, 0.5 * stat);
}

// p-value of the two-sample chi-square test on aligned histograms; bins are
// pooled in key order until each holds at least min_count combined.
inline double chi2_two_sample_p(const std::map<std::int64_t, std::int64_t>& h1,
                                const std::map<std::int64_t, std::int64_t>& h2,
                                double min_count = 10.0) {
  std::map<std::int64_t, std::pair<double, double>> merged;
  for (const auto& [k, v] : h1) merged[k].first += static_cast<double>(v);
  for (const auto& [k, v] : h2) merged[k].second += static_cast<double>(v);
  double n1 = 0.0, n2 = 0.0;
  for (const auto& [k, v] : merged) {
    n1 += v.first;
    n2 += v.second;
  }
  if (n1 <= 0.0 || n2 <= 0.0) throw std::domain_error("chi2: empty histogram");
  const double r1 = std::sqrt(n2 / n1), r2 = std::sqrt(n1 / n2);

  std::vector<std::pair<double, double>> bins;
  double a = 0.0, b = 0.0;
  for (const auto& [k, v] : merged) {
    a += v.first;
    b += v.second;
    if (a + b >= min_count) {
      bins.emplace_back(a, b);
      a = b = 0.0;
    }
  }
  if (a + b > 0.0) {
    if (bins.empty())
      bins.emplace_back(a, b);
    else {
      bins.back().first += a;
      bins.back().second += b;
    }
  }
  if (bins.size() < 2) throw std::domain_error("chi2: too few bins");

  double stat = 0.0;
  for (const auto& [x, y] : bins) {
    const double d = r1 * x - r2 * y;
    stat += d * d / (x + y);
  }
  return chi2_survival(stat, static_cast<int>(bins.size()) - 1);
}

// p-value of the one-sample chi-square test of observed counts against model
// probabilities; bins pooled in key order to expected count >= min_expected.
inline double chi2_one_sample_p(const std::map<std::int64_t, std::int64_t>& obs,
                                const std::map<std::int64_t, double>& probs,
                                double total, double min_expected = 5.0) {
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double o = 0.0, e = 0.0;
  for (const auto& [k, p] : probs) {
    const auto it = obs.find(k);
    o += it != obs.end() ? static_cast<double>(it->second) : 0.0;
    e += p * total;
    if (e >= min_expected) {
      bins.emplace_back(o, e);
      o = e = 0.0;
    }
  }
  if (e > 0.0) {
    if (bins.empty())
      bins.emplace_back(o, e);
    else {
      bins.back().first += o;
      bins.back().second += e;
    }
  }
  if (bins.size() < 2) throw std::domain_error("chi2: too few bins");
  double stat = 0.0;
  for (const auto& [x, y] : bins) stat += (x - y) * (x - y) / y;
  return chi2_survival(stat, static_cast<int>(bins.size()) - 1);
}

}  // namespace teststats

#endif
