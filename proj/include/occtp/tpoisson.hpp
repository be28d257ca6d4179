#pragma once

#include <cstdint>

#include "occtp/pmf.hpp"

namespace occtp {

// Integer shift plus a Poisson(rate) part. Fitting from (mu, var) matches the
// mean exactly and over-covers the variance by less than one:
// shift + rate = mu and var <= rate < var + 1.
struct TranslatedPoisson {
  std::int64_t shift = 0;
  double rate = 0.0;

  double mean() const { return static_cast<double>(shift) + rate; }
  double variance() const { return rate; }
};

TranslatedPoisson fit_tp(double mu, double var);

// mass at k; 0 below the shift; rate 0 is a point mass at the shift
double tp_pmf(const TranslatedPoisson& tp, std::int64_t k);

// smallest contiguous window whose complement carries mass <= eps; the
// complement mass is recorded as the Pmf tail defect
Pmf tp_pmf_window(const TranslatedPoisson& tp, double eps);

}  // namespace occtp
