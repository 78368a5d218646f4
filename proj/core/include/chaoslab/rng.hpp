#ifndef CHAOSLAB_RNG_HPP
#define CHAOSLAB_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace chaoslab {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011). Streams are
// keyed by (seed, stream); a trajectory index used as the stream gives
// reproducible parallel ensembles independent of scheduling.
class Philox {
 public:
  using result_type = std::uint32_t;

  Philox(std::uint64_t seed, std::uint64_t stream) : idx_(4) {
    key_ = {static_cast<std::uint32_t>(seed),
            static_cast<std::uint32_t>(seed >> 32)};
    counter_ = {0u, 0u, static_cast<std::uint32_t>(stream),
                static_cast<std::uint32_t>(stream >> 32)};
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (idx_ == 4) {
      block_ = round10_(counter_, key_);
      if (++counter_[0] == 0) ++counter_[1];
      idx_ = 0;
    }
    return block_[static_cast<std::size_t>(idx_++)];
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> round10_(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
      const std::array<std::uint32_t, 4> next = {
          static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
          static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
          static_cast<std::uint32_t>(p0)};
      c = next;
      k[0] += kW0;
      k[1] += kW1;
    }
    return c;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int idx_;
};

namespace rng {

/// Uniform on [0, 1).
inline double uniform(Philox& g) {
  const std::uint64_t hi = g();
  const std::uint64_t lo = g();
  return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1].
inline double uniform_pos(Philox& g) { return 1.0 - uniform(g); }

inline double exponential(Philox& g, double rate) {
  return -std::log(uniform_pos(g)) / rate;
}

inline double normal(Philox& g) {
  const double u1 = uniform_pos(g);
  const double u2 = uniform(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

namespace detail {

inline long long binomial_inversion(Philox& g, long long n, double p) {
  const double q = std::exp(static_cast<double>(n) * std::log1p(-p));
  const double odds = p / (1.0 - p);
  double u = uniform(g);
  double pk = q;
  long long k = 0;
  while (u > pk && k < n) {
    u -= pk;
    ++k;
    pk *= odds * static_cast<double>(n - k + 1) / static_cast<double>(k);
  }
  return k;
}

// BTRS transformed-rejection sampler (Hoermann 1993), exact for n p >= 10.
inline long long binomial_btrs(Philox& g, long long n, double p) {
  const double nd = static_cast<double>(n);
  const double spq = std::sqrt(nd * p * (1.0 - p));
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / (1.0 - p));
  const double m = std::floor((nd + 1.0) * p);
  const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
  for (;;) {
    const double u = uniform(g) - 0.5;
    double v = uniform(g);
    const double us = 0.5 - std::abs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + c);
    if (kd < 0.0 || kd > nd) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kd);
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
                 (kd - m) * lpq)
      return static_cast<long long>(kd);
  }
}

}  // namespace detail

inline long long binomial(Philox& g, long long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - binomial(g, n, 1.0 - p);
  if (static_cast<double>(n) * p < 10.0)
    return detail::binomial_inversion(g, n, p);
  return detail::binomial_btrs(g, n, p);
}

}  // namespace rng

}  // namespace chaoslab

#endif
