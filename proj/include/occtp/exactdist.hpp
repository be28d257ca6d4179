#pragma once

#include <cstdint>

#include "occtp/pmf.hpp"
#include "occtp/statistic.hpp"
#include "occtp/weights.hpp"

namespace occtp {

struct DpConfig {
  std::uint64_t boxes = 0;   // boxes resolved exactly
  double prune_eps = 0.0;    // per-state mass floor, at most 1e-9
};

// Law of the statistic by sequential conditioning on box counts: box j
// receives Binomial(balls left, p_j / remaining mass). Pruned and clipped
// mass, plus the chance of any ball landing past the last resolved box, goes
// into the tail defect.
Pmf exact_pmf(const WeightModel& model, std::uint64_t n, const Statistic& stat,
              const DpConfig& cfg);

// Brute-force oracle: sums the probability of every assignment of n labeled
// balls to the (finite) support. Guarded at J^n <= 1e7.
Pmf enumerate_pmf(const WeightModel& model, std::uint64_t n, const Statistic& stat);

// Law of the statistic when box counts are independent Poisson(n p_j),
// restricted to the first `boxes` boxes; the rest is folded into the defect.
Pmf poissonized_pmf(const WeightModel& model, std::uint64_t n, const Statistic& stat,
                    std::uint64_t boxes);

// P[every one of boxes 1..k is occupied], by inclusion-exclusion (k <= 25)
double low_boxes_all_occupied(const WeightModel& model, std::uint64_t n, std::uint32_t k);

}  // namespace occtp
