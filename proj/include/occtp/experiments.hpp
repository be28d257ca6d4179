#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "occtp/statistic.hpp"
#include "occtp/weights.hpp"

namespace occtp {

enum class RateMethod { Exact, MonteCarlo };

struct RateRow {
  std::uint64_t n = 0;
  double mu = 0.0;
  double sigma2 = 0.0;
  double d_tv = 0.0, d_tv_unc = 0.0;
  double d_loc = 0.0, d_loc_unc = 0.0;
  std::string method;  // "exact" or "monte_carlo"
  std::uint64_t samples = 0;
  double wall_time_ms = 0.0;
  bool tv_inconclusive = false;   // uncertainty above 30% of the distance
  bool loc_inconclusive = false;
  std::vector<std::string> warnings;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct RateStudy {
  std::vector<RateRow> rows;
  std::optional<SlopeFit> tv_slope;   // log d_tv against log sigma
  std::optional<SlopeFit> loc_slope;  // log d_loc against log sigma
};

// Distance of the statistic's law to its moment-matched translated Poisson
// across a grid of ball counts. Exact rows use the conditioning DP; Monte
// Carlo rows use seeded replicates with a certified plug-in bias bound.
RateStudy rate_study(const WeightModel& model, const Statistic& stat,
                     const std::vector<std::uint64_t>& n_grid, RateMethod method,
                     std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

// ordinary least squares on (log x, log y); absent with fewer than 2 points
std::optional<SlopeFit> fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

// tail factorization quality report: the independent-Poisson surrogate for
// the tail boxes, and the probability that every low box is occupied
struct LeCamReport {
  std::uint64_t tail_start = 0;
  double tail_mass = 0.0;
  double n_cubed_inverse = 0.0;
  std::optional<double> d_tv;      // exact vs Poissonized restricted law
  std::optional<double> d_tv_unc;
  bool bound_holds = true;         // d_tv <= tail_mass + uncertainty
  double low_boxes_prob = 1.0;     // all boxes below the cutoff occupied
  bool low_boxes_ok = true;        // >= 1 - n^-3
};
LeCamReport lecam_report(const WeightModel& model, std::uint64_t n);

// fixed schema: n,mu,sigma2,d_tv,d_tv_unc,d_loc,d_loc_unc,method,samples,wall_time_ms
void write_rate_csv(std::ostream& os, const RateStudy& study);

}  // namespace occtp
