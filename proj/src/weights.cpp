#include "occtp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "occtp/errors.hpp"

namespace occtp {

namespace {

double kahan_sum(const std::vector<double>& xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

double zeta_function(double a) {
  if (!(a > 1.0)) throw ValidationError("zeta exponent must be > 1 (non-summable otherwise)");
  // direct sum over j < N, Euler-Maclaurin from N on; the first omitted term
  // is O(N^{-a-5}), far below 1e-14 relative for N = 4096
  const std::uint64_t N = 4096;
  double s = 0.0, c = 0.0;
  for (std::uint64_t j = N - 1; j >= 1; --j) {
    double x = std::pow(static_cast<double>(j), -a);
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  const double Nd = static_cast<double>(N);
  double tail = std::pow(Nd, 1.0 - a) / (a - 1.0) + 0.5 * std::pow(Nd, -a) +
                a * std::pow(Nd, -a - 1.0) / 12.0 -
                a * (a + 1.0) * (a + 2.0) * std::pow(Nd, -a - 3.0) / 720.0;
  return s + tail;
}

std::optional<std::uint64_t> WeightModel::finite_support() const {
  if (kind_ == Kind::Explicit) return probs_.size();
  return std::nullopt;
}

double WeightModel::prob(std::uint64_t j) const {
  if (j == 0) throw ValidationError("box indices are 1-based");
  if (kind_ == Kind::Explicit) {
    return j <= probs_.size() ? probs_[j - 1] : 0.0;
  }
  return std::pow(static_cast<double>(j), -exponent_) / zeta_;
}

std::uint64_t WeightModel::cache_limit() const {
  if (kind_ == Kind::Explicit) return probs_.size();
  return kBlockSize * kMaxBlocks;
}

void WeightModel::extend_cache(std::uint64_t blocks_needed) const {
  std::lock_guard<std::mutex> lock(lazy_->grow);
  std::uint64_t ready = lazy_->blocks_ready.load(std::memory_order_acquire);
  for (std::uint64_t b = ready; b < blocks_needed; ++b) {
    auto block = std::make_unique<double[]>(kBlockSize);
    // restart compensation per block; recomputation is idempotent because it
    // starts from the stored end of the previous block
    double s = (b == 0) ? 0.0 : lazy_->blocks[b - 1][kBlockSize - 1];
    double c = 0.0;
    for (std::uint64_t i = 0; i < kBlockSize; ++i) {
      std::uint64_t j = b * kBlockSize + i + 1;
      double x = std::pow(static_cast<double>(j), -exponent_) / zeta_;
      double y = x - c;
      double t = s + y;
      c = (t - s) - y;
      s = t;
      block[i] = s;
    }
    lazy_->blocks[b] = std::move(block);
    lazy_->blocks_ready.store(b + 1, std::memory_order_release);
  }
}

double WeightModel::cumulative(std::uint64_t j) const {
  if (j == 0) return 0.0;
  if (kind_ == Kind::Explicit) {
    return j <= cum_.size() ? cum_[j - 1] : cum_.back();
  }
  if (j > cache_limit()) {
    throw ResourceError("cumulative sum requested past the cache capacity (" +
                        std::to_string(cache_limit()) + "); use tail_mass_bounds instead");
  }
  std::uint64_t blocks_needed = (j + kBlockSize - 1) / kBlockSize;
  if (lazy_->blocks_ready.load(std::memory_order_acquire) < blocks_needed) {
    extend_cache(blocks_needed);
  }
  std::uint64_t b = (j - 1) / kBlockSize;
  return lazy_->blocks[b][(j - 1) % kBlockSize];
}

Interval WeightModel::tail_mass_bounds(std::uint64_t j) const {
  if (j == 0) throw ValidationError("box indices are 1-based");
  if (kind_ == Kind::Explicit) {
    if (j > probs_.size()) return {0.0, 0.0};
    double t = std::max(0.0, cum_.back() - cumulative(j - 1));
    return {t, t};
  }
  // integral enclosure of sum_{i > J} i^-a / zeta(a), J = j - 1
  Interval analytic{0.0, 1.0};
  if (j >= 2) {
    const double J = static_cast<double>(j - 1);
    const double a = exponent_;
    double hi = std::pow(J, 1.0 - a) / ((a - 1.0) * zeta_);
    double lo = hi * std::max(0.0, 1.0 - a / J);
    analytic = {lo, hi};
  }
  if (j - 1 <= cache_limit()) {
    // partial sums carry a little accumulated rounding; keep a certified slack
    double t = 1.0 - cumulative(j - 1);
    const double slack = 1e-13;
    Interval exact{std::max(0.0, t - slack), std::min(1.0, t + slack)};
    double lo = std::max(exact.lo, analytic.lo);
    double hi = std::min(exact.hi, analytic.hi);
    if (lo > hi) {  // shouldn't happen; fall back to the wider enclosure
      return exact;
    }
    return {lo, hi};
  }
  return analytic;
}

WeightModel make_explicit(std::vector<double> probs) {
  if (probs.empty()) throw ValidationError("explicit weights: empty sequence");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0) || !std::isfinite(probs[i])) {
      throw ValidationError("explicit weights: entry " + std::to_string(i + 1) +
                            " is not a positive real");
    }
    if (i > 0 && probs[i] > probs[i - 1]) {
      throw ValidationError("explicit weights: not nonincreasing at entry " +
                            std::to_string(i + 1));
    }
  }
  double total = kahan_sum(probs);
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("explicit weights: sum is " + std::to_string(total) +
                          ", expected 1 within 1e-12");
  }
  WeightModel m;
  m.kind_ = WeightModel::Kind::Explicit;
  m.probs_ = std::move(probs);
  m.cum_.resize(m.probs_.size());
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < m.probs_.size(); ++i) {
    double y = m.probs_[i] - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
    m.cum_[i] = std::min(s, 1.0);
  }
  return m;
}

WeightModel make_zeta(double exponent) {
  if (!(exponent > 1.0) || !std::isfinite(exponent)) {
    throw ValidationError("zeta weights: exponent must be a finite real > 1");
  }
  WeightModel m;
  m.kind_ = WeightModel::Kind::ZetaPowerLaw;
  m.exponent_ = exponent;
  m.zeta_ = zeta_function(exponent);
  m.lazy_ = std::make_shared<WeightModel::LazyCumulative>();
  return m;
}

HalfSplit split_half(const WeightModel& model) {
  // tail(1) = 1 >= 1/2, so the split index is at least 2; tails decrease to 0
  std::uint64_t j = 2;
  while (true) {
    double tail = 1.0 - model.cumulative(j - 1);
    if (tail < 0.5) return {j, std::max(0.0, tail)};
    ++j;
  }
}

TailProfile tail_profile(const WeightModel& model, std::uint64_t n) {
  if (n < 3) throw ValidationError("tail profile requires n >= 3");
  const double threshold = 4.0 * std::log(static_cast<double>(n)) / static_cast<double>(n);
  std::uint64_t first = 1;
  if (model.prob(1) >= threshold) {
    // p is nonincreasing: exponential then binary search for the first index
    // strictly below the threshold
    std::uint64_t lo = 1, hi = 2;
    while (model.prob(hi) >= threshold) {
      lo = hi;
      hi *= 2;
    }
    while (hi - lo > 1) {
      std::uint64_t mid = lo + (hi - lo) / 2;
      if (model.prob(mid) >= threshold) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    first = hi;
  }
  TailProfile t;
  t.tail_start = first;
  t.top_prob = model.prob(first);
  t.tail_mass = std::max(0.0, 1.0 - model.cumulative(first - 1));
  return t;
}

namespace detail {

std::uint64_t first_n_over_log_squared(double target) {
  auto value = [](std::uint64_t n) {
    double ln = std::log(static_cast<double>(n));
    return static_cast<double>(n) / (ln * ln);
  };
  // n / log^2 n dips below 1.9 on 3..8 and increases from there, so the small
  // range is scanned directly and everything else is a monotone bisection
  for (std::uint64_t n = 3; n <= 8; ++n) {
    if (value(n) >= target) return n;
  }
  std::uint64_t hi = 16;
  while (value(hi) < target) {
    if (hi > (1ull << 60)) throw ResourceError("n/log^2 n target out of range");
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (value(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace detail

std::uint64_t min_admissible_n(const WeightModel& model) {
  HalfSplit split = split_half(model);
  if (!(split.tail_mass > 0.0)) {
    throw DegenerateError("model has an empty split tail (P0 = 0)");
  }
  std::uint64_t n1 = detail::first_n_over_log_squared(16.0 / split.tail_mass);

  // tail_start(n) is nondecreasing in n because the threshold 4 log(n)/n
  // decreases for n >= 3
  auto tail_ok = [&](std::uint64_t n) { return tail_profile(model, n).tail_start >= split.index; };
  std::uint64_t n2 = 3;
  if (!tail_ok(3)) {
    std::uint64_t hi = 6;
    while (!tail_ok(hi)) {
      if (hi > (1ull << 60)) throw ResourceError("tail_start never reaches the split index");
      hi *= 2;
    }
    std::uint64_t lo = hi / 2;
    while (hi - lo > 1) {
      std::uint64_t mid = lo + (hi - lo) / 2;
      if (tail_ok(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    n2 = hi;
  }
  return std::max<std::uint64_t>(3, std::max(n1, n2));
}

}  // namespace occtp
