#pragma once

// Internal numeric helpers shared by the implementation files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include "occtp/weights.hpp"

namespace occtp::detail {

struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

inline double log_choose(std::uint64_t n, std::uint64_t r) {
  if (r > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(r) + 1.0) -
         std::lgamma(static_cast<double>(n - r) + 1.0);
}

// (1 - p)^n without cancellation for small p
inline double pow_one_minus(double p, double n) {
  if (p >= 1.0) return n == 0.0 ? 1.0 : 0.0;
  return std::exp(n * std::log1p(-p));
}

// P[Binomial(n, p) >= 1]
inline double occupied_prob(double p, double n) {
  if (p >= 1.0) return 1.0;
  return -std::expm1(n * std::log1p(-p));
}

// P[Binomial(n, p) = r]
inline double binom_pmf(std::uint64_t n, double p, std::uint64_t r) {
  if (r > n) return 0.0;
  if (p <= 0.0) return r == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return r == n ? 1.0 : 0.0;
  return std::exp(log_choose(n, r) + static_cast<double>(r) * std::log(p) +
                  static_cast<double>(n - r) * std::log1p(-p));
}

// P[Poisson(lambda) = r]
inline double poisson_pmf(double lambda, std::uint64_t r) {
  if (lambda <= 0.0) return r == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(r) * std::log(lambda) - lambda -
                  std::lgamma(static_cast<double>(r) + 1.0));
}

// interval helpers for nonnegative enclosures
inline Interval iv_point(double v) { return {v, v}; }
inline Interval iv_add(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval iv_sub(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval iv_mul_nn(const Interval& a, const Interval& b) {  // both nonnegative
  return {std::max(0.0, a.lo) * std::max(0.0, b.lo), a.hi * b.hi};
}
inline Interval iv_scale(double k, const Interval& a) {
  return k >= 0 ? Interval{k * a.lo, k * a.hi} : Interval{k * a.hi, k * a.lo};
}
inline Interval iv_max0(const Interval& a) { return {std::max(0.0, a.lo), std::max(0.0, a.hi)}; }

// Certified enclosure of sum_{j >= from_j} g(p_j) for a power-law model,
// where g is nondecreasing in p on (0, p(from_j)]. Geometric blocks bracket
// each slab by its endpoint values. `unit_cap(pe)` must bound
// sup_{0 < p <= pe} g(p) / p, so the remainder past the last block is capped
// by unit_cap(edge) times the certified remaining tail mass.
inline Interval tail_sum_power_law(const WeightModel& m, std::uint64_t from_j,
                                   const std::function<double(double)>& g,
                                   const std::function<double(double)>& unit_cap) {
  Kahan lo, hi;
  std::uint64_t left = from_j - 1;  // blocks cover (left, right]
  const double kGrowth = 1.002;
  while (true) {
    std::uint64_t right = std::max(
        left + 1, static_cast<std::uint64_t>(static_cast<double>(left) * kGrowth));
    double count = static_cast<double>(right - left);
    lo.add(count * g(m.prob(right)));
    hi.add(count * g(m.prob(left + 1)));
    double remainder_cap = unit_cap(m.prob(right + 1)) * m.tail_mass_bounds(right + 1).hi;
    double width = hi.value() - lo.value();
    bool remainder_negligible = remainder_cap <= 1e-18 * std::max(lo.value(), 1e-300) ||
                                remainder_cap <= 1e-3 * width || remainder_cap < 1e-300;
    if (remainder_negligible || right > (1ull << 62)) {
      hi.add(remainder_cap);
      break;
    }
    left = right;
  }
  return {lo.value(), hi.value()};
}

inline std::function<double(double)> constant_unit_cap(double cap) {
  return [cap](double) { return cap; };
}

}  // namespace occtp::detail
