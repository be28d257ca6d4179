// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Run with no arguments for the full suite, or with a criterion number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "occtp/exactdist.hpp"
#include "occtp/experiments.hpp"
#include "occtp/lemmas.hpp"
#include "occtp/metrics.hpp"
#include "occtp/moments.hpp"
#include "occtp/occusim.hpp"
#include "occtp/tpoisson.hpp"
#include "occtp/weights.hpp"
#include "test_support.hpp"

using namespace occtp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double linf(const Pmf& a, const Pmf& b) { return occtp_test::linf_distance(a, b); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---- criterion 1: DP vs enumeration ---------------------------------------

Outcome criterion_1() {
  Outcome out;
  std::vector<WeightModel> models = {
      make_explicit({1.0}),
      make_explicit({0.5, 0.5}),
      make_explicit({0.5, 0.3, 0.2}),
      make_explicit({0.4, 0.3, 0.2, 0.1}),
      make_explicit({0.5, 0.3, 0.15, 0.05}),
      make_explicit({0.3, 0.25, 0.2, 0.15, 0.1}),
      make_explicit({0.2, 0.2, 0.2, 0.2, 0.2}),
  };
  std::vector<Statistic> stats = {Statistic::occupied_boxes(), Statistic::exactly(1),
                                  Statistic::exactly(2)};
  double worst = 0.0;
  for (const auto& model : models) {
    std::uint64_t J = *model.finite_support();
    for (std::uint64_t n = 1; n <= 6; ++n) {
      for (const auto& stat : stats) {
        Pmf oracle = enumerate_pmf(model, n, stat);
        Pmf dp = exact_pmf(model, n, stat, DpConfig{J, 0.0});
        worst = std::max(worst, linf(oracle, dp));
      }
    }
  }
  out.require(worst <= 1e-12, "max L-inf " + fmt(worst) + " above 1e-12");
  out.note("max L-inf " + fmt(worst) + " over 7 models x n<=6 x {kn, knr:1, knr:2}");
  return out;
}

// ---- criterion 2: moment consistency ---------------------------------------

Outcome criterion_2() {
  Outcome out;
  // exact grid: moments vs DP-law moments
  double worst_mu = 0.0, worst_var = 0.0;
  std::vector<WeightModel> models = {
      make_explicit({0.5, 0.3, 0.2}), make_explicit({0.5, 0.3, 0.15, 0.05}),
      make_explicit({0.3, 0.25, 0.2, 0.15, 0.1})};
  for (const auto& model : models) {
    std::uint64_t J = *model.finite_support();
    for (std::uint64_t n = 1; n <= 6; ++n) {
      for (const auto& stat :
           {Statistic::occupied_boxes(), Statistic::exactly(1), Statistic::exactly(2)}) {
        if (stat.kind == Statistic::Kind::ExactlyR &&
            static_cast<std::uint64_t>(stat.exact_count) > n) {
          continue;
        }
        Pmf law = exact_pmf(model, n, stat, DpConfig{J, 0.0});
        MomentSummary ms = moments(model, n, stat, MomentMode::ExactPairwise);
        worst_mu = std::max(worst_mu, std::abs(law.mean() - ms.mu));
        worst_var = std::max(worst_var, std::abs(law.variance() - ms.var));
      }
    }
  }
  out.require(worst_mu <= 1e-10, "mean gap " + fmt(worst_mu));
  out.require(worst_var <= 1e-10, "variance gap " + fmt(worst_var));

  // Monte Carlo cross-check on a 200-box model
  WeightModel big = occtp_test::truncated_square_model(200);
  const std::uint64_t reps = 100000;
  for (std::uint64_t n : {100ull, 1000ull}) {
    for (const auto& stat : {Statistic::occupied_boxes(), Statistic::exactly(1)}) {
      MomentSummary ms = moments(big, n, stat, MomentMode::ExactPairwise);
      Pmf sim = simulate_statistic_pmf(big, n, stat, reps, 0xc2 + n, 2);
      double se_mean = std::sqrt(ms.var / static_cast<double>(reps));
      double gap_mean = std::abs(sim.mean() - ms.mu);
      out.require(gap_mean <= 4.0 * se_mean,
                  "MC mean gap " + fmt(gap_mean) + " > 4se " + fmt(4.0 * se_mean));
      // standard error of the sample variance via the empirical fourth moment
      double mean = sim.mean(), m4 = 0.0;
      for (std::size_t i = 0; i < sim.masses.size(); ++i) {
        double d = static_cast<double>(sim.offset) + static_cast<double>(i) - mean;
        m4 += sim.masses[i] * d * d * d * d;
      }
      double r = static_cast<double>(reps);
      double var_of_var = (m4 - (r - 3.0) / (r - 1.0) * ms.var * ms.var) / r;
      double se_var = std::sqrt(std::max(var_of_var, 0.0));
      double gap_var = std::abs(sim.variance() * r / (r - 1.0) - ms.var);
      out.require(gap_var <= 4.0 * se_var,
                  "MC variance gap " + fmt(gap_var) + " > 4se " + fmt(4.0 * se_var));
    }
  }
  return out;
}

// ---- criterion 3: two-stage construction -----------------------------------

Outcome criterion_3() {
  Outcome out;
  WeightModel m = occtp_test::four_box_model();
  HalfSplit split = split_half(m);

  // exact equality of the joint tail laws at tiny scale, both constructions
  // enumerated from scratch
  for (std::uint64_t n = 1; n <= 3; ++n) {
    std::map<std::pair<int, int>, double> direct, staged;
    {  // occupancy: every labeled assignment over 4 boxes
      std::vector<int> a(n, 0);
      while (true) {
        double prob = 1.0;
        int c3 = 0, c4 = 0;
        for (std::uint64_t b = 0; b < n; ++b) {
          prob *= m.prob(a[b] + 1);
          c3 += a[b] + 1 == 3;
          c4 += a[b] + 1 == 4;
        }
        direct[{c3, c4}] += prob;
        std::uint64_t b = 0;
        while (b < n && a[b] == 3) {
          a[b] = 0;
          ++b;
        }
        if (b == n) break;
        a[b] += 1;
      }
    }
    {  // two-stage: multinomial on {3, 4} then per-ball thinning
      std::vector<int> s(n, 0);
      while (true) {
        double stage_prob = 1.0;
        for (std::uint64_t b = 0; b < n; ++b) {
          stage_prob *= m.prob(3 + s[b]) / split.tail_mass;
        }
        for (std::uint64_t keep = 0; keep < (1ull << n); ++keep) {
          double thin = 1.0;
          int c3 = 0, c4 = 0;
          for (std::uint64_t b = 0; b < n; ++b) {
            if (keep & (1ull << b)) {
              thin *= split.tail_mass;
              c3 += s[b] == 0;
              c4 += s[b] == 1;
            } else {
              thin *= 1.0 - split.tail_mass;
            }
          }
          staged[{c3, c4}] += stage_prob * thin;
        }
        std::uint64_t b = 0;
        while (b < n && s[b] == 1) {
          s[b] = 0;
          ++b;
        }
        if (b == n) break;
        s[b] += 1;
      }
    }
    double worst = 0.0;
    for (const auto& [k, v] : direct) {
      auto it = staged.find(k);
      worst = std::max(worst, std::abs(v - (it == staged.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, v] : staged) {
      auto it = direct.find(k);
      worst = std::max(worst, std::abs(v - (it == direct.end() ? 0.0 : it->second)));
    }
    out.require(worst <= 1e-12, "joint law gap " + fmt(worst) + " at n=" + std::to_string(n));
  }

  // seeded empirical marginals against Binomial(n, p_j)
  const std::uint64_t n = 6, reps = 100000;
  std::map<std::int64_t, std::uint64_t> obs3, obs4;
  for (std::uint64_t i = 0; i < reps; ++i) {
    AllocationSample s = sample_two_stage(m, n, 0xacce55 + i);
    auto count_of = [&](std::uint64_t j) -> std::int64_t {
      auto it = s.counts.find(j);
      return it == s.counts.end() ? 0 : static_cast<std::int64_t>(it->second);
    };
    obs3[count_of(3)] += 1;
    obs4[count_of(4)] += 1;
  }
  auto binom_expected = [&](double p) {
    std::map<std::int64_t, double> e;
    for (std::uint64_t k = 0; k <= n; ++k) {
      double lc = std::lgamma(7.0) - std::lgamma(k + 1.0) - std::lgamma(7.0 - k);
      e[static_cast<std::int64_t>(k)] = std::exp(lc + k * std::log(p) + (n - k) * std::log1p(-p));
    }
    return e;
  };
  double p3 = occtp_test::chi_square_p_value(obs3, binom_expected(0.15), reps);
  double p4 = occtp_test::chi_square_p_value(obs4, binom_expected(0.05), reps);
  out.require(p3 > 1e-4, "chi-square p-value for box 3 is " + fmt(p3));
  out.require(p4 > 1e-4, "chi-square p-value for box 4 is " + fmt(p4));
  out.note("chi-square p-values " + fmt(p3) + ", " + fmt(p4));
  return out;
}

// ---- criterion 4: conditional law vs its translated Poisson ----------------

Outcome criterion_4() {
  Outcome out;
  struct Setup {
    double exponent;
    std::uint64_t n;
    int count;
  };
  // mixed scales so the 4/sigma bound is non-vacuous on many instances and
  // the 280/sigma^2 bound on some
  std::vector<Setup> setups = {{1.6, 3000, 500}, {2.0, 1000, 300}, {1.2, 8000, 200}};
  int nontrivial_tv = 0, nontrivial_loc = 0, checked = 0;
  int violations = 0;
  std::uint64_t seed = 0x22bb;
  for (const auto& setup : setups) {
    WeightModel z = make_zeta(setup.exponent);
    TailProfile tp = tail_profile(z, setup.n);
    HalfSplit split = split_half(z);
    Statistic stat =
        Statistic::occupied_boxes().restricted(std::max(tp.tail_start, split.index));
    for (int i = 0; i < setup.count; ++i) {
      AllocationSample s = sample_two_stage(z, setup.n, seed++);
      auto [mu, s2] = conditional_moments(*s.stage_one, z, setup.n, stat);
      if (!(s2 > 0.0)) continue;
      ++checked;
      Pmf law = conditional_pmf_given_stage_one(*s.stage_one, z, stat);
      Pmf ref = tp_pmf_window(fit_tp(mu, s2), 1e-12);
      DistanceResult tv = total_variation(law, ref);
      DistanceResult loc = local_distance(law, ref);
      double sigma = std::sqrt(s2);
      double tv_bound = std::min(4.0 / sigma, 1.0);
      double loc_bound = std::min(280.0 / s2, 1.0);
      if (tv_bound < 1.0) ++nontrivial_tv;
      if (loc_bound < 1.0) ++nontrivial_loc;
      if (tv.value > tv_bound + tv.uncertainty) ++violations;
      if (loc.value > loc_bound + loc.uncertainty) ++violations;
    }
  }
  out.require(checked >= 1000, "only " + std::to_string(checked) + " usable outcomes");
  out.require(violations == 0, std::to_string(violations) + " bound violations");
  out.note(std::to_string(checked) + " outcomes, " + std::to_string(nontrivial_tv) +
           " with 4/sigma < 1, " + std::to_string(nontrivial_loc) + " with 280/sigma^2 < 1");
  return out;
}

// ---- criteria 5 and 6: rate studies ----------------------------------------

Outcome rate_criterion(const Statistic& stat, const char* label) {
  Outcome out;
  WeightModel z = make_zeta(2.0);
  std::vector<std::uint64_t> grid = {250, 500, 1000, 2000, 4000};
  RateStudy study = rate_study(z, stat, grid, RateMethod::MonteCarlo, 1000000, 0x5a7e, 2);

  int flagged = 0;
  double tv_lo = 1e300, tv_hi = 0.0, loc_lo = 1e300, loc_hi = 0.0;
  for (const auto& row : study.rows) {
    double sigma = std::sqrt(row.sigma2);
    if (!row.tv_inconclusive) {
      tv_lo = std::min(tv_lo, sigma * row.d_tv);
      tv_hi = std::max(tv_hi, sigma * row.d_tv);
    } else {
      ++flagged;
    }
    if (!row.loc_inconclusive) {
      loc_lo = std::min(loc_lo, row.sigma2 * row.d_loc);
      loc_hi = std::max(loc_hi, row.sigma2 * row.d_loc);
    } else {
      ++flagged;
    }
  }
  out.require(study.tv_slope.has_value(), "no tv slope (too many flagged rows)");
  out.require(study.loc_slope.has_value(), "no loc slope (too many flagged rows)");
  if (study.tv_slope) {
    out.require(study.tv_slope->slope >= -1.5 && study.tv_slope->slope <= -0.6,
                "tv slope " + fmt(study.tv_slope->slope) + " outside [-1.5, -0.6]");
  }
  if (study.loc_slope) {
    out.require(study.loc_slope->slope >= -2.6 && study.loc_slope->slope <= -1.5,
                "loc slope " + fmt(study.loc_slope->slope) + " outside [-2.6, -1.5]");
  }
  out.require(tv_hi / tv_lo <= 3.0, "sigma*d_tv spread " + fmt(tv_hi / tv_lo) + " > 3");
  out.require(loc_hi / loc_lo <= 3.0, "sigma^2*d_loc spread " + fmt(loc_hi / loc_lo) + " > 3");
  std::string slopes;
  if (study.tv_slope && study.loc_slope) {
    slopes = "slopes " + fmt(study.tv_slope->slope) + " / " + fmt(study.loc_slope->slope);
  }
  out.note(std::string(label) + ": " + slopes + ", spreads " + fmt(tv_hi / tv_lo) + " / " +
           fmt(loc_hi / loc_lo) + ", " + std::to_string(flagged) + " flagged");
  return out;
}

Outcome criterion_5() { return rate_criterion(Statistic::occupied_boxes(), "kn"); }

Outcome criterion_6() {
  // rows below the admissible floor (about 2.4e3 here) carry warnings and
  // stay in the fit; dropping them would leave a single usable point
  Outcome out = rate_criterion(Statistic::exactly(1), "knr:1");
  return out;
}

// ---- criterion 7: tail factorization ----------------------------------------

Outcome criterion_7() {
  Outcome out;
  std::vector<WeightModel> models = {
      occtp_test::four_box_model(), occtp_test::geometric_model(),
      occtp_test::truncated_square_model(60), occtp_test::truncated_square_model(500)};
  for (const auto& model : models) {
    for (std::uint64_t n : {100ull, 200ull, 500ull, 1000ull}) {
      LeCamReport rep = lecam_report(model, n);
      out.require(rep.bound_holds, "tail tv bound failed at n=" + std::to_string(n));
      out.require(rep.low_boxes_ok,
                  "low-box occupation below 1 - n^-3 at n=" + std::to_string(n));
    }
  }
  return out;
}

// ---- criterion 8: moment-lemma suite ----------------------------------------

Outcome criterion_8() {
  Outcome out;
  LemmaSuiteConfig cfg;
  cfg.seed = 0x1e44a;
  cfg.identity_instances = 10000;
  cfg.inequality_instances = 10000;
  std::vector<LemmaReport> reports = run_lemma_suite(cfg);
  int failures = 0;
  for (const auto& rep : reports) {
    if (!rep.vacuous && !rep.pass) {
      ++failures;
      out.note(rep.lemma_id + " failed: " + rep.instance);
    }
  }
  out.require(failures == 0, std::to_string(failures) + " failing lemma rows");
  out.note(std::to_string(reports.size()) + " summary rows, all identities within 1e-12");
  return out;
}

// ---- criterion 9: decomposition --------------------------------------------

Outcome criterion_9() {
  Outcome out;
  WeightModel z = make_zeta(2.0);
  struct Run {
    std::uint64_t n, reps;
  };
  for (const Run& run : {Run{256, 50000}, Run{1024, 40000}, Run{4096, 20000}}) {
    Decomposition dec =
        decomposition_estimate(z, run.n, Statistic::occupied_boxes(), run.reps, 0xdec0 + run.n);
    double combined = dec.se_sigma2 + dec.se_rho2 + dec.se_tau2;
    double gap = std::abs(dec.sigma2 - dec.rho2 - dec.tau2);
    out.require(gap <= 4.0 * combined,
                "identity gap " + fmt(gap) + " > 4se " + fmt(4.0 * combined) + " at n=" +
                    std::to_string(run.n));
    ConditionRatios cr = condition_ratios(dec);
    out.require(cr.nu2_over_rho2 >= 1e-2 && cr.nu2_over_rho2 <= 1e2,
                "nu2/rho2 " + fmt(cr.nu2_over_rho2) + " outside [1e-2, 1e2]");
    out.require(cr.rho2_over_sigma2 >= 1e-2 && cr.rho2_over_sigma2 <= 1e2,
                "rho2/sigma2 " + fmt(cr.rho2_over_sigma2) + " outside [1e-2, 1e2]");
    out.note("n=" + std::to_string(run.n) + ": nu2/rho2 " + fmt(cr.nu2_over_rho2) +
             ", rho2/sigma2 " + fmt(cr.rho2_over_sigma2));
  }
  return out;
}

const char* kDescriptions[] = {
    "exact DP equals the enumeration oracle (1e-12 L-inf, J<=5, n<=6)",
    "moment sums match DP laws (1e-10) and Monte Carlo (4 se)",
    "two-stage construction equals the restricted occupancy law",
    "conditional laws within min(4/sigma, 1) and min(280/sigma^2, 1) of their TP fits",
    "K_n rate study: slopes and scaled-distance spreads in their windows",
    "K_{n,1} rate study: slopes and scaled-distance spreads in their windows",
    "tail total-variation below the tail mass; low boxes occupied up to n^-3",
    "moment-lemma sweeps: identities to 1e-12, inequalities with zero failures",
    "variance decomposition identity and bounded condition ratios",
};

}  // namespace

int main(int argc, char** argv) {
  Outcome (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                             criterion_6, criterion_7, criterion_8, criterion_9};
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (int i = 1; i <= 9; ++i) {
    if (only != 0 && i != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome out = criteria[i - 1]();
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    std::printf("%s criterion %d: %s [%.1fs]%s%s\n", out.pass ? "PASS" : "FAIL", i,
                kDescriptions[i - 1], secs, out.detail.empty() ? "" : " -- ",
                out.detail.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
