#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace occtp {

// Certified two-sided enclosure of a nonnegative quantity.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
};

// A nonincreasing probability sequence p_1 >= p_2 >= ... > 0, either given
// explicitly (finite, p_j = 0 past the end) or as the power law
// p_j = j^(-a) / zeta(a). Immutable after construction except for the lazily
// extended cache of partial sums, which is safe for concurrent read/extend.
class WeightModel {
 public:
  enum class Kind { Explicit, ZetaPowerLaw };

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  double zeta_constant() const { return zeta_; }

  // support length for Explicit models, empty for the power law
  std::optional<std::uint64_t> finite_support() const;

  // 1-based; 0 past the end of a finite model
  double prob(std::uint64_t j) const;

  // sum of p_i for i <= j; cumulative(0) = 0. Throws ResourceError past the
  // cache capacity of a power-law model.
  double cumulative(std::uint64_t j) const;

  // certified enclosure of the tail mass sum_{i >= j} p_i
  Interval tail_mass_bounds(std::uint64_t j) const;
  double tail_mass(std::uint64_t j) const { return tail_mass_bounds(j).mid(); }

  // largest index with an exactly computable cumulative sum
  std::uint64_t cache_limit() const;

 private:
  friend WeightModel make_explicit(std::vector<double> probs);
  friend WeightModel make_zeta(double exponent);

  WeightModel() = default;

  static constexpr std::uint64_t kBlockSize = 1ull << 16;
  static constexpr std::uint64_t kMaxBlocks = 128;  // exact sums up to ~8.4e6

  struct LazyCumulative {
    std::mutex grow;
    std::atomic<std::uint64_t> blocks_ready{0};
    std::array<std::unique_ptr<double[]>, kMaxBlocks> blocks;
  };

  void extend_cache(std::uint64_t blocks_needed) const;

  Kind kind_ = Kind::Explicit;
  std::vector<double> probs_;  // Explicit
  std::vector<double> cum_;    // Explicit, eager
  double exponent_ = 0.0;      // ZetaPowerLaw
  double zeta_ = 1.0;
  std::shared_ptr<LazyCumulative> lazy_;  // ZetaPowerLaw
};

WeightModel make_explicit(std::vector<double> probs);
WeightModel make_zeta(double exponent);

// zeta(a) for a > 1, by direct summation plus Euler-Maclaurin tail; relative
// error well below 1e-14
double zeta_function(double a);

// smallest index whose tail mass falls strictly below 1/2, and that mass
struct HalfSplit {
  std::uint64_t index = 0;   // the tail sum from index-1 is still >= 1/2
  double tail_mass = 0.0;    // sum of p_j, j >= index; always < 1/2
};
HalfSplit split_half(const WeightModel& model);

// tail cutoff against the threshold 4 log(n) / n (natural log)
struct TailProfile {
  std::uint64_t tail_start = 1;  // smallest j with p_j < threshold
  double top_prob = 0.0;         // p at tail_start
  double tail_mass = 0.0;        // total mass from tail_start on
};
TailProfile tail_profile(const WeightModel& model, std::uint64_t n);

// smallest n >= 3 with n / log^2(n) >= 16 / P0 and tail_start(n) >= the half
// split index; both conditions are monotone from there on
std::uint64_t min_admissible_n(const WeightModel& model);

namespace detail {
// smallest n >= 3 with n / log^2(n) >= target (target >= 2); helper exposed
// for tests
std::uint64_t first_n_over_log_squared(double target);
}  // namespace detail

}  // namespace occtp
