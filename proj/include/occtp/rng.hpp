#pragma once

#include <cstdint>

namespace occtp {

// Splittable 64-bit generator: a splitmix64 walk whose starting point is a
// hash of (seed, stream index). Streams derived from the same seed can be
// consumed in any order, so parallel replication stays reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed);
    r.state_ = mix(r.state_ ^ mix(index * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull));
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // 53-bit mantissa uniform on [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_double() < p; }

  // uniform integer in [0, bound)
  std::uint64_t next_below(std::uint64_t bound) {
    // multiply-shift; bias is < 2^-64 per draw, irrelevant at our scales
    unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace occtp
