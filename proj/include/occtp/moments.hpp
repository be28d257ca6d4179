#pragma once

#include <cstdint>

#include "occtp/statistic.hpp"
#include "occtp/weights.hpp"

namespace occtp {

enum class MomentMode { ExactPairwise, HybridLargeScale };

struct MomentSummary {
  double mu = 0.0;
  double var = 0.0;
  double truncation_error = 0.0;  // certified bound on |reported - true|
  MomentMode mode = MomentMode::ExactPairwise;
};

// Mean and variance of the statistic under n balls thrown into the model's
// boxes. ExactPairwise runs the full pairwise covariance sum (guarded at
// 5000 boxes); HybridLargeScale is exact over the 2000 largest boxes and
// first-order separable beyond, with a certified truncation bound.
MomentSummary moments(const WeightModel& model, std::uint64_t n, const Statistic& stat,
                      MomentMode mode);

// sum over the tail profile cutoff of (n p_j)^r e^{-n p_j} / r!
double mu_hat_r(const WeightModel& model, std::uint64_t n, int r);

// two-sided check of the restricted mean against its Poisson surrogate
struct MuBoundReport {
  double mu_restricted = 0.0;
  double mu_hat = 0.0;
  double ratio = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool pass = false;
  bool vacuous = false;  // empty tail: both sums are zero
};
MuBoundReport mu_bound_check(const WeightModel& model, std::uint64_t n, int r);

namespace detail {
// largest pairwise indicator covariance over the full pairwise scan; the
// occupancy counts are negatively associated, so this must never be positive
double occupied_pairwise_max_cov(const WeightModel& model, std::uint64_t n,
                                 std::uint64_t first_index);
}  // namespace detail

}  // namespace occtp
