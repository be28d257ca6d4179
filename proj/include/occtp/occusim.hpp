#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "occtp/pmf.hpp"
#include "occtp/rng.hpp"
#include "occtp/statistic.hpp"
#include "occtp/weights.hpp"

namespace occtp {

using CountMap = std::map<std::uint64_t, std::uint32_t>;

struct AllocationSample {
  CountMap counts;                    // balls per box
  std::optional<CountMap> stage_one;  // pre-thinning counts (two-stage only)
  std::uint64_t seed = 0;
};

// Inverse-CDF sampler for box indices j >= first_index with probabilities
// p_j / renorm. A guide table narrows the binary search without changing its
// result; draws past the cached range invert the certified tail enclosure.
class BoxSampler {
 public:
  BoxSampler(const WeightModel& model, std::uint64_t first_index, double renorm);

  std::uint64_t draw(Rng& rng) const;
  std::uint64_t table_end() const { return table_end_; }

 private:
  std::uint64_t invert_tail(double target) const;

  const WeightModel* model_;
  std::uint64_t first_index_;
  std::uint64_t table_end_;
  double renorm_;
  double base_;              // cumulative mass before first_index
  std::vector<double> cum_;  // absolute cumulative sums over the table
  std::vector<std::uint32_t> guide_;
  std::uint64_t guide_cells_ = 0;
};

// n inverse-CDF draws over the whole model; sum of counts is n
AllocationSample sample_allocation(const WeightModel& model, std::uint64_t n, std::uint64_t seed);

// stage one throws n balls on the split tail with probabilities p_j / P0,
// then thins each ball with retention P0; rejected balls are not re-thrown,
// so the counts realize only the boxes from the split index on
AllocationSample sample_two_stage(const WeightModel& model, std::uint64_t n, std::uint64_t seed);

// conditional mean and variance of the statistic given stage-one counts;
// requires stat.restricted_from to be set
std::pair<double, double> conditional_moments(const CountMap& stage_one, const WeightModel& model,
                                              std::uint64_t n, const Statistic& stat);

// exact conditional law given stage-one counts: a Poisson-binomial
// convolution of the per-box retention kernels
Pmf conditional_pmf_given_stage_one(const CountMap& stage_one, const WeightModel& model,
                                    const Statistic& stat);

struct Decomposition {
  double sigma2 = 0.0;  // variance of the statistic
  double tau2 = 0.0;    // variance of the conditional mean
  double rho2 = 0.0;    // mean of the conditional variance
  double nu2 = 0.0;     // variance of the conditional variance
  double se_sigma2 = 0.0, se_tau2 = 0.0, se_rho2 = 0.0, se_nu2 = 0.0;
  std::vector<double> u_samples;  // standardized conditional means
  std::uint64_t reps = 0;
  bool clamped = false;  // a variance estimate was clamped at zero
  std::vector<std::string> warnings;
};

Decomposition decomposition_estimate(const WeightModel& model, std::uint64_t n, Statistic stat,
                                     std::uint64_t reps, std::uint64_t seed);

struct ConditionRatios {
  double nu2_over_rho2 = 0.0;
  double rho2_over_sigma2 = 0.0;
  double se_nu2_over_rho2 = 0.0;
  double se_rho2_over_sigma2 = 0.0;
};
ConditionRatios condition_ratios(const Decomposition& dec);

// empirical law of the statistic over `reps` independent allocations;
// bit-identical for a given seed regardless of `threads`
Pmf simulate_statistic_pmf(const WeightModel& model, std::uint64_t n, const Statistic& stat,
                           std::uint64_t reps, std::uint64_t seed, unsigned threads = 1);

}  // namespace occtp
