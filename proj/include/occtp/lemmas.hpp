#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace occtp {

enum class EvalMethod { ClosedForm, BruteForce };

struct LemmaReport {
  std::string lemma_id;
  std::string instance;  // compact parameter rendering
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  bool vacuous = false;  // preconditions not met: reported, never failed
  std::string method;
};

// E{ M_(s) x^M } for M ~ Binomial(m, p); closed form or the defining sum
double binomial_factorial_moment(std::uint32_t m, double p, std::uint32_t s, double x,
                                 EvalMethod method);

// E{ L_(u) M_(v) w^L x^M } for (L, M) trinomial(m; p, q)
double trinomial_joint_moment(std::uint32_t m, double p, double q, std::uint32_t u,
                              std::uint32_t v, double w, double x, EvalMethod method);

// upper bounds on the factorial moments under exponential tilting, and the
// two-sided variance-of-x^M sandwich; expectations evaluated exactly
std::vector<LemmaReport> binomial_moment_bound_checks(std::uint32_t m, double p, std::uint32_t s,
                                                      double x, double big_p, double delta,
                                                      double delta0);

// covariance of monotone-dominated functions of trinomial counts against the
// explicit product-moment bound; f, g, h, k are tables on 0..m
struct CovarianceBoundResult {
  std::vector<LemmaReport> reports;
};
CovarianceBoundResult covariance_bound_check(std::uint32_t m, double p, double q,
                                             const std::vector<double>& f,
                                             const std::vector<double>& g,
                                             const std::vector<double>& h,
                                             const std::vector<double>& k);

// weighted exponential sum comparisons (five parts) with constants derived by
// numeric supremum search
std::vector<LemmaReport> tail_sum_bound_checks(const std::vector<double>& weights,
                                               std::uint64_t n, int r, std::uint32_t u,
                                               std::uint32_t v, double alpha);

namespace lemma_detail {
// sup of fn over [x_lo, x_hi], by geometric scan plus golden-section refinement
double numeric_sup(const std::function<double(double)>& fn, double x_lo, double x_hi);
// branch suprema of the part-(i) ratio x^{u+1} e^{-(1+a)x} / (min(x,1) e^{-x})
double sum_bound_head_constant(std::uint32_t u, double alpha);  // over 0 < x <= 1
double sum_bound_tail_constant(std::uint32_t u, double alpha);  // over x >= 1
}  // namespace lemma_detail

// randomized verification sweep over every lemma; returns one summary row per
// lemma part plus a row for each failing instance
struct LemmaSuiteConfig {
  std::uint64_t seed = 0;
  std::uint32_t identity_instances = 10000;
  std::uint32_t inequality_instances = 10000;
};
std::vector<LemmaReport> run_lemma_suite(const LemmaSuiteConfig& cfg);
bool lemma_suite_passed(const std::vector<LemmaReport>& reports);

}  // namespace occtp
