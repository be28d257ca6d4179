#include "occtp/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail_math.hpp"
#include "occtp/errors.hpp"
#include "occtp/rng.hpp"

namespace occtp {
namespace {

using detail::Kahan;

constexpr std::uint32_t kBinomialCap = 60;   // exact enumeration in doubles
constexpr std::uint32_t kTrinomialCap = 40;
constexpr double kIdentityTol = 1e-12;
constexpr double kInequalityTol = 1e-12;

double pow0(double base, std::uint32_t e) { return e == 0 ? 1.0 : std::pow(base, e); }

double falling(double l, std::uint32_t s) {
  double v = 1.0;
  for (std::uint32_t i = 0; i < s; ++i) v *= l - static_cast<double>(i);
  return v;
}

// dense Binomial(m, p) table, exact at this scale
std::vector<double> binom_table(std::uint32_t m, double p) {
  std::vector<double> t(m + 1, 0.0);
  if (p <= 0.0) {
    t[0] = 1.0;
    return t;
  }
  if (p >= 1.0) {
    t[m] = 1.0;
    return t;
  }
  for (std::uint32_t l = 0; l <= m; ++l) {
    t[l] = std::exp(detail::log_choose(m, l) + l * std::log(p) +
                    (m - l) * std::log1p(-p));
  }
  return t;
}

double tri_pmf(std::uint32_t m, double p, double q, std::uint32_t l, std::uint32_t k) {
  if (l + k > m) return 0.0;
  double rest = 1.0 - p - q;
  if (p <= 0.0 && l > 0) return 0.0;
  if (q <= 0.0 && k > 0) return 0.0;
  if (rest <= 0.0 && l + k < m) return 0.0;
  double lg = std::lgamma(m + 1.0) - std::lgamma(l + 1.0) - std::lgamma(k + 1.0) -
              std::lgamma(static_cast<double>(m - l - k) + 1.0);
  double lp = (l > 0 ? l * std::log(p) : 0.0) + (k > 0 ? k * std::log(q) : 0.0) +
              (l + k < m ? (m - l - k) * std::log(rest) : 0.0);
  return std::exp(lg + lp);
}

std::string fmt_instance(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, value] : kv) {
    if (!first) os << " ";
    first = false;
    os << name << "=" << value;
  }
  return os.str();
}

LemmaReport identity_report(const std::string& id, const std::string& instance, double closed,
                            double brute) {
  LemmaReport rep;
  rep.lemma_id = id;
  rep.instance = instance;
  rep.lhs = closed;
  rep.rhs = brute;
  rep.method = "closed_form vs brute_force";
  rep.pass = std::abs(closed - brute) <= kIdentityTol * std::max(1.0, std::abs(brute));
  return rep;
}

LemmaReport inequality_report(const std::string& id, const std::string& instance, double lhs,
                              double rhs) {
  LemmaReport rep;
  rep.lemma_id = id;
  rep.instance = instance;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.method = "brute_force";
  rep.pass = lhs <= rhs + kInequalityTol;
  return rep;
}

LemmaReport vacuous_report(const std::string& id, const std::string& instance) {
  LemmaReport rep;
  rep.lemma_id = id;
  rep.instance = instance;
  rep.pass = true;
  rep.vacuous = true;
  rep.method = "preconditions not met";
  return rep;
}

}  // namespace

double binomial_factorial_moment(std::uint32_t m, double p, std::uint32_t s, double x,
                                 EvalMethod method) {
  if (s > m) throw ValidationError("factorial moment: s must be <= m");
  if (m > kBinomialCap) throw ResourceError("factorial moment: m capped at 60");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("factorial moment: p must lie in [0, 1]");
  if (!(x >= 0.0)) throw ValidationError("factorial moment: x must be >= 0");
  if (method == EvalMethod::ClosedForm) {
    return falling(m, s) * pow0(x * p, s) * pow0(1.0 + p * (x - 1.0), m - s);
  }
  std::vector<double> pmf = binom_table(m, p);
  Kahan acc;
  for (std::uint32_t l = 0; l <= m; ++l) {
    if (l < s) continue;
    acc.add(falling(l, s) * pow0(x, l) * pmf[l]);
  }
  return acc.value();
}

double trinomial_joint_moment(std::uint32_t m, double p, double q, std::uint32_t u,
                              std::uint32_t v, double w, double x, EvalMethod method) {
  if (m > kTrinomialCap) throw ResourceError("trinomial moment: m capped at 40");
  if (!(p >= 0.0 && q >= 0.0 && p + q <= 1.0 + 1e-15)) {
    throw ValidationError("trinomial moment: need p, q >= 0 with p + q <= 1");
  }
  if (u + v > m) throw ValidationError("trinomial moment: u + v must be <= m");
  if (!(w >= 0.0 && x >= 0.0)) throw ValidationError("trinomial moment: w, x must be >= 0");
  if (method == EvalMethod::ClosedForm) {
    return falling(m, u + v) * pow0(w * p, u) * pow0(x * q, v) *
           pow0(1.0 + p * (w - 1.0) + q * (x - 1.0), m - u - v);
  }
  Kahan acc;
  for (std::uint32_t l = 0; l <= m; ++l) {
    if (l < u) continue;
    for (std::uint32_t k = 0; l + k <= m; ++k) {
      if (k < v) continue;
      acc.add(falling(l, u) * falling(k, v) * pow0(w, l) * pow0(x, k) * tri_pmf(m, p, q, l, k));
    }
  }
  return acc.value();
}

std::vector<LemmaReport> binomial_moment_bound_checks(std::uint32_t m, double p, std::uint32_t s,
                                                      double x, double big_p, double delta,
                                                      double delta0) {
  if (s > m) throw ValidationError("moment bounds: s must be <= m");
  if (m > kBinomialCap) throw ResourceError("moment bounds: m capped at 60");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("moment bounds: p must lie in [0, 1]");

  const double md = static_cast<double>(m);
  std::vector<LemmaReport> out;
  std::string inst = fmt_instance({{"m", md}, {"p", p}, {"s", static_cast<double>(s)},
                                   {"x", x}, {"P", big_p}, {"delta", delta},
                                   {"delta0", delta0}});

  bool tilt_ok = delta >= 0.0 && delta <= delta0 && delta0 <= 1.0 &&
                 (1.0 - big_p) * std::exp(delta0) <= 1.0 + 1e-12 && big_p >= 0.0 && big_p <= 1.0;
  if (tilt_ok) {
    double lhs_ii = binomial_factorial_moment(m, p, s, std::exp(delta), EvalMethod::BruteForce);
    double rhs_ii = pow0(md * p, s) * std::exp(delta0 * (s + md * p * std::exp(1.0)));
    out.push_back(inequality_report("binomial-moment-bound.ii", inst, lhs_ii, rhs_ii));

    double y = (1.0 - big_p) * std::exp(delta);
    double lhs_iii = binomial_factorial_moment(m, p, s, y, EvalMethod::BruteForce);
    double rhs_iii = pow0(md * p * (1.0 - big_p), s) *
                     std::exp(-(md - s) * p * big_p) *
                     std::exp(delta0 * (s + md * p * std::exp(1.0) * (1.0 - big_p)));
    out.push_back(inequality_report("binomial-moment-bound.iii", inst, lhs_iii, rhs_iii));
  } else {
    out.push_back(vacuous_report("binomial-moment-bound.ii", inst));
    out.push_back(vacuous_report("binomial-moment-bound.iii", inst));
  }

  bool sandwich_ok = x >= 0.0 && x <= 1.0 && p <= 0.5;
  if (sandwich_ok) {
    double ex2 = binomial_factorial_moment(m, p, 0, x * x, EvalMethod::BruteForce);
    double ex = binomial_factorial_moment(m, p, 0, x, EvalMethod::BruteForce);
    double mid = std::exp(md * p * (1.0 - x * x)) * (ex2 - ex * ex);
    double omx2 = (1.0 - x) * (1.0 - x);
    double cx = std::min(-std::expm1(-omx2), omx2 * std::exp(-omx2));
    // the variance factorization carries a factor (1-p)/(1-p(1-x^2)) that can
    // fall to 1/2 near x = 1; the half below keeps the lower constant valid
    // on the whole precondition range (without it, m=4 p=0.09097 x=0.91707
    // is a counterexample)
    double lower = 0.5 * cx * std::exp(-2.0 * md * p * p) * std::min(1.0, md * p);
    double upper = std::min(1.0, md * p * (1.0 - x * x));
    out.push_back(inequality_report("binomial-moment-bound.iv-lower", inst, lower, mid));
    out.push_back(inequality_report("binomial-moment-bound.iv-upper", inst, mid, upper));
  } else {
    out.push_back(vacuous_report("binomial-moment-bound.iv-lower", inst));
    out.push_back(vacuous_report("binomial-moment-bound.iv-upper", inst));
  }
  return out;
}

CovarianceBoundResult covariance_bound_check(std::uint32_t m, double p, double q,
                                             const std::vector<double>& f,
                                             const std::vector<double>& g,
                                             const std::vector<double>& h,
                                             const std::vector<double>& k) {
  if (m > kTrinomialCap) throw ResourceError("covariance bound: m capped at 40");
  if (f.size() != m + 1 || g.size() != m + 1 || h.size() != m + 1 || k.size() != m + 1) {
    throw ValidationError("covariance bound: tables must have m + 1 entries");
  }
  for (std::uint32_t l = 0; l <= m; ++l) {
    if (std::abs(f[l]) > h[l] + 1e-15 || std::abs(g[l]) > k[l] + 1e-15) {
      throw ValidationError("covariance bound: dominance |f| <= h, |g| <= k violated at " +
                            std::to_string(l));
    }
  }
  CovarianceBoundResult out;
  std::string inst = fmt_instance({{"m", static_cast<double>(m)}, {"p", p}, {"q", q}});
  const double delta = p + q;
  if (!(p >= 0.0 && q >= 0.0 && delta <= 0.25)) {
    out.reports.push_back(vacuous_report("covariance-bound.nonneg", inst));
    out.reports.push_back(vacuous_report("covariance-bound.signed", inst));
    return out;
  }

  // exact covariance over the trinomial support
  Kahan joint;
  for (std::uint32_t l = 0; l <= m; ++l) {
    for (std::uint32_t t = 0; l + t <= m; ++t) {
      joint.add(f[l] * g[t] * tri_pmf(m, p, q, l, t));
    }
  }
  std::vector<double> pl = binom_table(m, p), pm = binom_table(m, q);
  auto expect = [&](const std::vector<double>& pmf, const std::function<double(std::uint32_t)>& w) {
    Kahan acc;
    for (std::uint32_t l = 0; l <= m; ++l) acc.add(w(l) * pmf[l]);
    return acc.value();
  };
  double ef = expect(pl, [&](std::uint32_t l) { return f[l]; });
  double eg = expect(pm, [&](std::uint32_t l) { return g[l]; });
  double cov = joint.value() - ef * eg;

  double e_lh = expect(pl, [&](std::uint32_t l) { return l * h[l] * std::exp(2.0 * l * delta); });
  double e_k = expect(pm, [&](std::uint32_t l) { return k[l] * std::exp(2.0 * l * delta); });
  double e_h = expect(pl, [&](std::uint32_t l) { return h[l] * std::exp(2.0 * l * delta); });
  double e_mk = expect(pm, [&](std::uint32_t l) { return l * k[l] * std::exp(2.0 * l * delta); });
  double c1 = std::exp(1.0) * delta * (e_lh * e_k + e_h * e_mk);

  bool nonneg = true;
  for (std::uint32_t l = 0; l <= m; ++l) {
    if (f[l] < 0.0 || g[l] < 0.0) nonneg = false;
  }
  if (nonneg) {
    out.reports.push_back(inequality_report("covariance-bound.nonneg", inst, cov, c1));
  } else {
    out.reports.push_back(vacuous_report("covariance-bound.nonneg", inst));
  }

  double e_lh_plain = expect(pl, [&](std::uint32_t l) { return l * h[l]; });
  double e_mk_plain = expect(pm, [&](std::uint32_t l) { return l * k[l]; });
  double e_h_plain = expect(pl, [&](std::uint32_t l) { return h[l]; });
  double e_k_plain = expect(pm, [&](std::uint32_t l) { return k[l]; });
  double rhs2 = c1 + 2.0 / static_cast<double>(m) * e_lh_plain * e_mk_plain +
                4.0 * static_cast<double>(m) / 3.0 * p * q * e_h_plain * e_k_plain;
  out.reports.push_back(inequality_report("covariance-bound.signed", inst, cov, rhs2));
  return out;
}

namespace lemma_detail {

double numeric_sup(const std::function<double(double)>& fn, double x_lo, double x_hi) {
  // geometric scan, then golden-section refinement around the best cell
  const int kCells = 512;
  double best_x = x_lo, best = fn(x_lo);
  double ratio = std::pow(x_hi / std::max(x_lo, 1e-12), 1.0 / kCells);
  double x = std::max(x_lo, 1e-12);
  for (int i = 0; i <= kCells; ++i) {
    double v = fn(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
    x *= ratio;
  }
  double a = std::max(x_lo, best_x / (ratio * ratio));
  double b = std::min(x_hi, best_x * ratio * ratio);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 120; ++it) {
    if (fn(c) < fn(d)) {
      a = c;
    } else {
      b = d;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  double mid = 0.5 * (a + b);
  return std::max(best, fn(mid));
}

double sum_bound_head_constant(std::uint32_t u, double alpha) {
  return numeric_sup([&](double x) { return std::pow(x, static_cast<double>(u)) *
                                            std::exp(-alpha * x); },
                     1e-9, 1.0);
}

double sum_bound_tail_constant(std::uint32_t u, double alpha) {
  return numeric_sup([&](double x) { return std::pow(x, static_cast<double>(u) + 1.0) *
                                            std::exp(-alpha * x); },
                     1.0, 1e6);
}

}  // namespace lemma_detail

std::vector<LemmaReport> tail_sum_bound_checks(const std::vector<double>& weights,
                                               std::uint64_t n, int r, std::uint32_t u,
                                               std::uint32_t v, double alpha) {
  if (r < 1) throw ValidationError("sum bounds: r must be >= 1");
  if (v > u) throw ValidationError("sum bounds: need u >= v >= 0");
  if (!(alpha > 0.0)) throw ValidationError("sum bounds: alpha must be > 0");
  if (n < 1) throw ValidationError("sum bounds: n must be >= 1");
  double total = 0.0;
  for (double p : weights) {
    if (!(p >= 0.0)) throw ValidationError("sum bounds: weights must be nonnegative");
    total += p;
  }
  if (total > 1.0 + 1e-12) throw ValidationError("sum bounds: weights must sum to at most 1");

  const double nd = static_cast<double>(n);
  auto weighted = [&](const std::function<double(double)>& term) {
    Kahan acc;
    for (double p : weights) acc.add(term(nd * p));
    return acc.value();
  };
  double s2_0 = weighted([](double x) { return std::min(x, 1.0) * std::exp(-x); });
  double s2_r = weighted([&](double x) { return pow0(x, r) * std::exp(-x); });

  std::vector<LemmaReport> out;
  std::string inst = fmt_instance({{"J", static_cast<double>(weights.size())},
                                   {"P", total}, {"n", nd}, {"r", static_cast<double>(r)},
                                   {"u", static_cast<double>(u)}, {"v", static_cast<double>(v)},
                                   {"alpha", alpha}});

  {
    double lhs = weighted([&](double x) { return pow0(x, u + 1) * std::exp(-(1.0 + alpha) * x); });
    double k0 = std::max(lemma_detail::sum_bound_head_constant(u, alpha),
                         lemma_detail::sum_bound_tail_constant(u, alpha));
    out.push_back(inequality_report("sum-bound.i", inst, lhs, k0 * s2_0));
  }
  {
    double lhs = weighted([&](double x) { return pow0(x, u + r) * std::exp(-(1.0 + alpha) * x); });
    double kr = lemma_detail::numeric_sup(
        [&](double x) { return pow0(x, u) * std::exp(-alpha * x); }, 1e-9, 1e6);
    out.push_back(inequality_report("sum-bound.ii", inst, lhs, kr * s2_r));
  }
  {
    double lhs = weighted([&](double x) { return pow0(x, u + 1) * std::exp(-x); });
    double ku = lemma_detail::numeric_sup(
        [&](double x) { return pow0(x, u) * std::exp(-x); }, 1e-9, 1e6);
    out.push_back(inequality_report("sum-bound.iii", inst, lhs, ku * nd * total));
  }
  {
    double s1 = weighted([](double x) { return x * std::exp(-x); });
    double kp = std::max(lemma_detail::sum_bound_head_constant(0, 1.0),
                         lemma_detail::sum_bound_tail_constant(0, 1.0));
    out.push_back(inequality_report("sum-bound.iv", inst, s1 * s1, kp * nd * s2_0));
  }
  {
    double f_ru = weighted([&](double x) { return pow0(x, r + u) * std::exp(-x); });
    double f_rv = weighted([&](double x) { return pow0(x, r + v) * std::exp(-x); });
    double lhs = f_ru * f_rv;  // the double sum factorizes
    double kuv;
    if (v == 0) {
      kuv = lemma_detail::numeric_sup(
          [&](double x) { return pow0(x, r + u - 1) * std::exp(-x); }, 1e-9, 1e6);
    } else {
      double expo = (static_cast<double>(r) + v - 1.0) / (static_cast<double>(r) + u - 1.0);
      kuv = lemma_detail::numeric_sup(
          [&](double x) { return pow0(x, r + u + v - 1) * std::exp(-expo * x); }, 1e-9, 1e7);
    }
    out.push_back(inequality_report("sum-bound.v", inst, lhs, kuv * nd * total * s2_r));
  }
  return out;
}

namespace {

struct SuiteTracker {
  std::string id;
  std::uint64_t checked = 0, vacuous = 0, failures = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();  // lhs - rhs (or rel err)
  LemmaReport worst;
  std::vector<LemmaReport> failed;

  void absorb(const LemmaReport& rep, bool identity) {
    if (rep.vacuous) {
      ++vacuous;
      return;
    }
    ++checked;
    double margin = identity
                        ? std::abs(rep.lhs - rep.rhs) / std::max(1.0, std::abs(rep.rhs))
                        : rep.lhs - rep.rhs;
    if (margin > worst_margin) {
      worst_margin = margin;
      worst = rep;
    }
    if (!rep.pass) {
      ++failures;
      if (failed.size() < 20) failed.push_back(rep);
    }
  }

  void emit(std::vector<LemmaReport>& out) const {
    LemmaReport summary = worst;
    summary.lemma_id = id;
    std::ostringstream os;
    os << checked << " instances checked, " << vacuous << " vacuous, " << failures
       << " failures; worst: " << worst.instance;
    summary.instance = os.str();
    summary.pass = failures == 0;
    summary.vacuous = checked == 0;
    out.push_back(summary);
    for (const auto& rep : failed) out.push_back(rep);
  }
};

}  // namespace

std::vector<LemmaReport> run_lemma_suite(const LemmaSuiteConfig& cfg) {
  Rng rng = Rng::stream(cfg.seed, 0x1e44a5);
  std::vector<LemmaReport> out;

  {  // factorial moment identity
    SuiteTracker tr;
    tr.id = "factorial-moment-identity";
    for (std::uint32_t i = 0; i < cfg.identity_instances; ++i) {
      std::uint32_t m = static_cast<std::uint32_t>(rng.next_below(kBinomialCap + 1));
      double p = rng.next_double();
      std::uint32_t s = static_cast<std::uint32_t>(rng.next_below(std::min(m, 6u) + 1));
      double x = 2.5 * rng.next_double();
      double closed = binomial_factorial_moment(m, p, s, x, EvalMethod::ClosedForm);
      double brute = binomial_factorial_moment(m, p, s, x, EvalMethod::BruteForce);
      tr.absorb(identity_report(tr.id,
                                fmt_instance({{"m", static_cast<double>(m)}, {"p", p},
                                              {"s", static_cast<double>(s)}, {"x", x}}),
                                closed, brute),
                true);
    }
    tr.emit(out);
  }

  {  // trinomial moment identity
    SuiteTracker tr;
    tr.id = "trinomial-moment-identity";
    for (std::uint32_t i = 0; i < cfg.identity_instances; ++i) {
      std::uint32_t m = static_cast<std::uint32_t>(rng.next_below(kTrinomialCap + 1));
      double split = rng.next_double();
      double mass = rng.next_double();
      double p = split * mass, q = (1.0 - split) * mass;
      std::uint32_t cap = std::min(m, 4u);
      std::uint32_t u = static_cast<std::uint32_t>(rng.next_below(cap + 1));
      std::uint32_t v = static_cast<std::uint32_t>(rng.next_below(cap + 1 - u));
      double w = 2.0 * rng.next_double();
      double x = 2.0 * rng.next_double();
      double closed = trinomial_joint_moment(m, p, q, u, v, w, x, EvalMethod::ClosedForm);
      double brute = trinomial_joint_moment(m, p, q, u, v, w, x, EvalMethod::BruteForce);
      tr.absorb(identity_report(tr.id,
                                fmt_instance({{"m", static_cast<double>(m)}, {"p", p}, {"q", q},
                                              {"u", static_cast<double>(u)},
                                              {"v", static_cast<double>(v)}, {"w", w}, {"x", x}}),
                                closed, brute),
                true);
    }
    tr.emit(out);
  }

  {  // binomial moment bounds (ii)-(iv)
    SuiteTracker ii, iii, ivl, ivu;
    ii.id = "binomial-moment-bound.ii";
    iii.id = "binomial-moment-bound.iii";
    ivl.id = "binomial-moment-bound.iv-lower";
    ivu.id = "binomial-moment-bound.iv-upper";
    for (std::uint32_t i = 0; i < cfg.inequality_instances; ++i) {
      std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.next_below(kBinomialCap));
      double p = rng.next_double();
      std::uint32_t s = static_cast<std::uint32_t>(rng.next_below(std::min(m, 5u) + 1));
      double big_p = rng.next_double();
      // every 16th instance deliberately violates the tilt preconditions
      double max_d0 = std::min(1.0, -std::log1p(-std::min(big_p, 1.0 - 1e-12)));
      double delta0 = (i % 16 == 15) ? 1.5 : max_d0 * rng.next_double();
      double delta = delta0 * rng.next_double();
      double x = rng.next_double();
      double p_iv = (i % 16 == 7) ? 0.5 + 0.5 * rng.next_double() : 0.5 * rng.next_double();
      auto reps = binomial_moment_bound_checks(m, (i % 2 == 0) ? p : p_iv, s, x, big_p, delta,
                                               delta0);
      ii.absorb(reps[0], false);
      iii.absorb(reps[1], false);
      ivl.absorb(reps[2], false);
      ivu.absorb(reps[3], false);
    }
    ii.emit(out);
    iii.emit(out);
    ivl.emit(out);
    ivu.emit(out);
  }

  {  // covariance bounds
    SuiteTracker nn, sg;
    nn.id = "covariance-bound.nonneg";
    sg.id = "covariance-bound.signed";
    for (std::uint32_t i = 0; i < cfg.inequality_instances; ++i) {
      std::uint32_t m = 2 + static_cast<std::uint32_t>(rng.next_below(19));
      double delta = 0.25 * rng.next_double();
      double split = rng.next_double();
      double p = delta * split, q = delta * (1.0 - split);
      bool signed_case = (i % 2 == 1);
      std::vector<double> f(m + 1), g(m + 1), h(m + 1), k(m + 1);
      double fa = rng.next_double() * 2.0, ga = rng.next_double() * 2.0;
      for (std::uint32_t l = 0; l <= m; ++l) {
        h[l] = fa * (0.2 + rng.next_double()) * (1.0 + 0.3 * l);
        k[l] = ga * (0.2 + rng.next_double()) * (1.0 + 0.3 * l);
        double uf = signed_case ? 2.0 * rng.next_double() - 1.0 : rng.next_double();
        double ug = signed_case ? 2.0 * rng.next_double() - 1.0 : rng.next_double();
        f[l] = uf * h[l];
        g[l] = ug * k[l];
      }
      auto res = covariance_bound_check(m, p, q, f, g, h, k);
      nn.absorb(res.reports[0], false);
      sg.absorb(res.reports[1], false);
    }
    nn.emit(out);
    sg.emit(out);
  }

  {  // weighted tail sum bounds (i)-(v)
    SuiteTracker trs[5];
    const char* part_ids[5] = {"sum-bound.i", "sum-bound.ii", "sum-bound.iii", "sum-bound.iv",
                               "sum-bound.v"};
    for (int part = 0; part < 5; ++part) trs[part].id = part_ids[part];
    for (std::uint32_t i = 0; i < cfg.inequality_instances; ++i) {
      std::uint32_t count = 1 + static_cast<std::uint32_t>(rng.next_below(30));
      std::vector<double> w(count);
      double total_cap = rng.next_double();
      double raw = 0.0;
      for (auto& p : w) {
        p = std::pow(rng.next_double(), 3.0);
        raw += p;
      }
      for (auto& p : w) p *= total_cap / std::max(raw, 1e-300);
      std::uint64_t n = 10 + rng.next_below(9991);
      int r = 1 + static_cast<int>(rng.next_below(4));
      std::uint32_t u = static_cast<std::uint32_t>(rng.next_below(4));
      std::uint32_t v = static_cast<std::uint32_t>(rng.next_below(u + 1));
      double alpha = 0.1 + 1.9 * rng.next_double();
      auto reps = tail_sum_bound_checks(w, n, r, u, v, alpha);
      for (int part = 0; part < 5; ++part) trs[part].absorb(reps[part], false);
    }
    for (auto& tr : trs) tr.emit(out);
  }

  return out;
}

bool lemma_suite_passed(const std::vector<LemmaReport>& reports) {
  for (const auto& rep : reports) {
    if (!rep.vacuous && !rep.pass) return false;
  }
  return true;
}

}  // namespace occtp
