#include <cmath>

#include "doctest.h"
#include "occtp/errors.hpp"
#include "occtp/rng.hpp"
#include "occtp/tpoisson.hpp"

using namespace occtp;

TEST_CASE("fit lands inside the defining inequalities") {
  TranslatedPoisson a = fit_tp(3.0, 3.0);
  CHECK(a.shift == 0);
  CHECK(a.rate == 3.0);

  TranslatedPoisson b = fit_tp(5.3, 2.0);
  CHECK(b.shift == 3);
  CHECK(b.rate == doctest::Approx(2.3).epsilon(1e-14));

  TranslatedPoisson c = fit_tp(4.0, 1.0);
  CHECK(c.shift == 3);
  CHECK(c.rate == 1.0);

  // degenerate: zero variance at an exact integer mean
  TranslatedPoisson d = fit_tp(7.0, 0.0);
  CHECK(d.shift == 7);
  CHECK(d.rate == 0.0);

  // zero variance at a fractional mean still fits
  TranslatedPoisson e = fit_tp(7.25, 0.0);
  CHECK(e.shift == 7);
  CHECK(e.rate == doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS(fit_tp(1.0, -0.5), ValidationError);
  CHECK_THROWS_AS(fit_tp(std::nan(""), 1.0), ValidationError);
}

TEST_CASE("random fits: mean exact, variance within one") {
  Rng rng(20240601);
  for (int i = 0; i < 10000; ++i) {
    double mu = 200.0 * rng.next_double() - 100.0;
    double var = 50.0 * rng.next_double();
    TranslatedPoisson tp = fit_tp(mu, var);
    CHECK(std::abs(tp.mean() - mu) <= 1e-12 * std::max(1.0, std::abs(mu)));
    CHECK(tp.rate >= var);
    CHECK(tp.rate < var + 1.0);
    // shifting the mean by one shifts the fit by exactly one
    TranslatedPoisson up = fit_tp(mu + 1.0, var);
    CHECK(up.shift == tp.shift + 1);
    CHECK(up.rate == doctest::Approx(tp.rate).epsilon(1e-12));
  }
}

TEST_CASE("pmf values") {
  TranslatedPoisson tp{0, 3.0};
  CHECK(tp_pmf(tp, 0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));

  TranslatedPoisson shifted{3, 2.3};
  CHECK(tp_pmf(shifted, 2) == 0.0);
  CHECK(tp_pmf(shifted, 3) == doctest::Approx(std::exp(-2.3)).epsilon(1e-13));

  // cross-check a mid value against the direct series
  double direct = std::exp(-2.3);
  for (int i = 1; i <= 5; ++i) direct *= 2.3 / i;
  CHECK(tp_pmf(shifted, 8) == doctest::Approx(direct).epsilon(1e-12));

  TranslatedPoisson degenerate{5, 0.0};
  CHECK(tp_pmf(degenerate, 5) == 1.0);
  CHECK(tp_pmf(degenerate, 6) == 0.0);
}

TEST_CASE("window covers all but eps and sums to one") {
  TranslatedPoisson degenerate{0, 0.0};
  Pmf w0 = tp_pmf_window(degenerate, 0.5);
  CHECK(w0.masses.size() == 1);
  CHECK(w0.at(0) == 1.0);
  CHECK(w0.tail_defect == 0.0);

  Pmf w = tp_pmf_window({0, 3.0}, 1e-12);
  CHECK(w.support_min() == 0);
  CHECK(w.table_mass() >= 1.0 - 1e-12);
  CHECK(w.table_mass() <= 1.0 + 1e-10);
  // minimality: removing the top point pushes the complement above eps
  CHECK(w.table_mass() - w.masses.back() < 1.0 - 1e-12);

  Pmf shifted = tp_pmf_window({10, 4.0}, 1e-12);
  CHECK(shifted.support_min() >= 10);

  // window masses agree with the pointwise pmf
  TranslatedPoisson big{25, 1234.5};
  Pmf bw = tp_pmf_window(big, 1e-12);
  CHECK(bw.table_mass() == doctest::Approx(1.0).epsilon(1e-10));
  for (std::int64_t k : {bw.support_min(), (bw.support_min() + bw.support_max()) / 2,
                         bw.support_max()}) {
    CHECK(bw.at(k) == doctest::Approx(tp_pmf(big, k)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(tp_pmf_window({0, 1.0}, 0.0), ValidationError);
  CHECK_THROWS_AS(tp_pmf_window({0, 1.0}, 1.0), ValidationError);
  // astronomically wide windows are refused rather than allocated
  CHECK_THROWS_AS(tp_pmf_window({0, 1e16}, 1e-12), ResourceError);
}
