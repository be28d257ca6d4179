#pragma once

#include <cstdint>
#include <map>

#include "occtp/pmf.hpp"

namespace occtp {

// plug-in distance plus a certified radius from the two tail defects
struct DistanceResult {
  double value = 0.0;
  double uncertainty = 0.0;
};

// half the L1 distance over the union of supports
DistanceResult total_variation(const Pmf& p, const Pmf& q);

// sup over integers of the pointwise mass difference
DistanceResult local_distance(const Pmf& p, const Pmf& q);

// normalized frequencies; rejects empty input
Pmf empirical_pmf(const std::map<std::int64_t, std::uint64_t>& counts);

}  // namespace occtp
