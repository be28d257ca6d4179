#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "occtp/errors.hpp"
#include "occtp/exactdist.hpp"
#include "occtp/metrics.hpp"
#include "occtp/moments.hpp"
#include "occtp/occusim.hpp"
#include "occtp/tpoisson.hpp"
#include "occtp/weights.hpp"
#include "test_support.hpp"

using namespace occtp;

namespace {

// joint law of the counts on the split tail under the plain occupancy scheme,
// by enumeration of every labeled-ball assignment
std::map<std::vector<std::uint32_t>, double> occupancy_tail_law(const WeightModel& m,
                                                                std::uint64_t n,
                                                                std::uint64_t from) {
  std::uint64_t J = *m.finite_support();
  std::map<std::vector<std::uint32_t>, double> law;
  std::vector<std::uint32_t> assign(n, 0);
  while (true) {
    double prob = 1.0;
    std::vector<std::uint32_t> tail_counts(J - from + 1, 0);
    for (std::uint64_t b = 0; b < n; ++b) {
      prob *= m.prob(assign[b] + 1);
      if (assign[b] + 1 >= from) tail_counts[assign[b] + 1 - from] += 1;
    }
    law[tail_counts] += prob;
    std::uint64_t b = 0;
    while (b < n && assign[b] + 1 == J) {
      assign[b] = 0;
      ++b;
    }
    if (b == n) break;
    assign[b] += 1;
  }
  return law;
}

// the same joint law under the two-stage construction: multinomial stage one
// on the tail, then independent thinning of each ball
std::map<std::vector<std::uint32_t>, double> two_stage_tail_law(const WeightModel& m,
                                                                std::uint64_t n) {
  HalfSplit split = split_half(m);
  std::uint64_t J = *m.finite_support();
  std::uint64_t width = J - split.index + 1;
  std::map<std::vector<std::uint32_t>, double> law;
  std::vector<std::uint32_t> stage(n, 0);   // tail box of each ball (0-based)
  while (true) {
    double stage_prob = 1.0;
    for (std::uint64_t b = 0; b < n; ++b) {
      stage_prob *= m.prob(split.index + stage[b]) / split.tail_mass;
    }
    // every retention pattern over the n balls
    for (std::uint64_t keep = 0; keep < (1ull << n); ++keep) {
      double thin_prob = 1.0;
      std::vector<std::uint32_t> counts(width, 0);
      for (std::uint64_t b = 0; b < n; ++b) {
        if (keep & (1ull << b)) {
          thin_prob *= split.tail_mass;
          counts[stage[b]] += 1;
        } else {
          thin_prob *= 1.0 - split.tail_mass;
        }
      }
      law[counts] += stage_prob * thin_prob;
    }
    std::uint64_t b = 0;
    while (b < n && stage[b] + 1 == width) {
      stage[b] = 0;
      ++b;
    }
    if (b == n) break;
    stage[b] += 1;
  }
  return law;
}

}  // namespace

TEST_CASE("direct sampling basics") {
  AllocationSample one = sample_allocation(make_explicit({1.0}), 1, 42);
  CHECK(one.counts.size() == 1);
  CHECK(one.counts.at(1) == 1);
  CHECK(!one.stage_one.has_value());

  // law of large numbers on a fair two-box model
  AllocationSample big = sample_allocation(make_explicit({0.5, 0.5}), 1000000, 7);
  std::uint64_t total = 0;
  for (const auto& [j, c] : big.counts) total += c;
  CHECK(total == 1000000);
  double freq = static_cast<double>(big.counts.at(1)) / 1e6;
  CHECK(std::abs(freq - 0.5) <= 10.0 * std::sqrt(0.25 / 1e6));

  // power law: box-1 frequency within ten standard errors
  AllocationSample z = sample_allocation(make_zeta(2.0), 1000, 11);
  std::uint64_t ztotal = 0;
  for (const auto& [j, c] : z.counts) ztotal += c;
  CHECK(ztotal == 1000);
  double p1 = 0.6079271018540267;
  double zfreq = static_cast<double>(z.counts.at(1)) / 1000.0;
  CHECK(std::abs(zfreq - p1) <= 10.0 * std::sqrt(p1 * (1 - p1) / 1000.0));
}

TEST_CASE("sampling is deterministic in the seed") {
  WeightModel m = make_zeta(2.0);
  AllocationSample a = sample_allocation(m, 5000, 123456);
  AllocationSample b = sample_allocation(m, 5000, 123456);
  CHECK(a.counts == b.counts);
  AllocationSample c = sample_allocation(m, 5000, 123457);
  CHECK(a.counts != c.counts);

  AllocationSample t1 = sample_two_stage(m, 2000, 99);
  AllocationSample t2 = sample_two_stage(m, 2000, 99);
  CHECK(t1.counts == t2.counts);
  CHECK(*t1.stage_one == *t2.stage_one);
}

TEST_CASE("two-stage sample structure") {
  WeightModel m = occtp_test::four_box_model();  // split at 3, mass 0.2
  AllocationSample s = sample_two_stage(m, 500, 31337);
  REQUIRE(s.stage_one.has_value());
  std::uint64_t stage_total = 0;
  for (const auto& [j, c] : *s.stage_one) {
    CHECK(j >= 3);
    stage_total += c;
  }
  CHECK(stage_total == 500);
  std::uint64_t kept = 0;
  for (const auto& [j, c] : s.counts) {
    CHECK(j >= 3);
    CHECK(c <= s.stage_one->at(j));
    kept += c;
  }
  CHECK(kept <= 500);

  CHECK_THROWS_AS(sample_two_stage(make_explicit({1.0}), 10, 1), DegenerateError);
}

TEST_CASE("exact two-stage law equals the restricted occupancy law") {
  WeightModel m = occtp_test::four_box_model();
  for (std::uint64_t n : {1ull, 2ull, 3ull}) {
    auto direct = occupancy_tail_law(m, n, 3);
    auto staged = two_stage_tail_law(m, n);
    for (const auto& [counts, prob] : direct) {
      auto it = staged.find(counts);
      double other = it == staged.end() ? 0.0 : it->second;
      CHECK(std::abs(prob - other) <= 1e-12);
    }
    for (const auto& [counts, prob] : staged) {
      auto it = direct.find(counts);
      double other = it == direct.end() ? 0.0 : it->second;
      CHECK(std::abs(prob - other) <= 1e-12);
    }
  }
  // the worked example: both balls land one each in boxes 3 and 4
  auto staged = two_stage_tail_law(m, 2);
  CHECK(staged.at({1, 1}) == doctest::Approx(0.015).epsilon(1e-12));
}

TEST_CASE("two-stage marginals pass a chi-square test against Binomial(n, p_j)") {
  WeightModel m = occtp_test::four_box_model();
  const std::uint64_t n = 6, reps = 100000;
  std::map<std::int64_t, std::uint64_t> obs3, obs4;
  for (std::uint64_t i = 0; i < reps; ++i) {
    AllocationSample s = sample_two_stage(m, n, 1000 + i);
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
      e[static_cast<std::int64_t>(k)] =
          std::exp(lc + k * std::log(p) + (n - k) * std::log1p(-p));
    }
    return e;
  };
  CHECK(occtp_test::chi_square_p_value(obs3, binom_expected(0.15), reps) > 1e-4);
  CHECK(occtp_test::chi_square_p_value(obs4, binom_expected(0.05), reps) > 1e-4);
}

TEST_CASE("conditional moments and conditional law") {
  WeightModel m = occtp_test::four_box_model();  // P0 = 0.2
  Statistic occ = Statistic::occupied_boxes().restricted(3);

  CountMap empty;
  auto [mu0, s20] = conditional_moments(empty, m, 5, occ);
  CHECK(mu0 == 0.0);
  CHECK(s20 == 0.0);

  CountMap single{{3, 1}};
  auto [mu1, s21] = conditional_moments(single, m, 5, occ);
  CHECK(mu1 == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(s21 == doctest::Approx(0.16).epsilon(1e-14));

  Statistic ex1 = Statistic::exactly(1).restricted(3);
  CountMap three{{3, 3}};
  auto [muz, s2z] = conditional_moments(three, m, 5, ex1);
  CHECK(muz == doctest::Approx(0.384).epsilon(1e-14));
  CHECK(s2z == doctest::Approx(0.236544).epsilon(1e-13));

  // two boxes with kernel value one half each: split mass 1 - 1/sqrt(2) and
  // two stage-one balls per box give z(2) = 1 - (1 - P0)^2 = 1/2
  double root_half = 1.0 / std::sqrt(2.0);
  WeightModel half_kernel =
      make_explicit({0.5, root_half - 0.5, 0.15, 1.0 - root_half - 0.15});
  REQUIRE(split_half(half_kernel).index == 3);
  Pmf flat = conditional_pmf_given_stage_one(CountMap{{3, 2}, {4, 2}}, half_kernel, occ);
  CHECK(flat.at(0) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(flat.at(1) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(flat.at(2) == doctest::Approx(0.25).epsilon(1e-13));

  // kernels 0.2 and 0.384: hand-convolved masses
  Pmf law = conditional_pmf_given_stage_one(CountMap{{3, 1}, {4, 3}}, m, ex1);
  CHECK(law.at(0) == doctest::Approx(0.8 * 0.616).epsilon(1e-13));
  CHECK(law.at(1) == doctest::Approx(0.2 * 0.616 + 0.8 * 0.384).epsilon(1e-13));
  CHECK(law.at(2) == doctest::Approx(0.2 * 0.384).epsilon(1e-13));

  Pmf none = conditional_pmf_given_stage_one(empty, m, occ);
  CHECK(none.at(0) == 1.0);

  // restricted_from is mandatory here
  CHECK_THROWS_AS(conditional_moments(single, m, 5, Statistic::occupied_boxes()),
                  ValidationError);
}

TEST_CASE("conditional law matches conditional moments") {
  WeightModel m = occtp_test::four_box_model();
  Statistic occ = Statistic::occupied_boxes().restricted(3);
  Rng rng(5150);
  for (int i = 0; i < 50; ++i) {
    CountMap stage;
    stage[3] = static_cast<std::uint32_t>(rng.next_below(8));
    stage[4] = static_cast<std::uint32_t>(rng.next_below(8));
    auto [mu, s2] = conditional_moments(stage, m, 16, occ);
    Pmf law = conditional_pmf_given_stage_one(stage, m, occ);
    CHECK(law.mean() == doctest::Approx(mu).scale(1.0).epsilon(1e-12));
    CHECK(law.variance() == doctest::Approx(s2).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("conditional law is close to its translated Poisson fit") {
  // pointwise version of the sum-of-Bernoulli bounds with C1 = 4, C2 = 280
  WeightModel z = make_zeta(1.6);
  HalfSplit split = split_half(z);
  TailProfile tp = tail_profile(z, 300);
  Statistic stat = Statistic::occupied_boxes().restricted(std::max(tp.tail_start, split.index));
  for (std::uint64_t i = 0; i < 100; ++i) {
    AllocationSample s = sample_two_stage(z, 300, 9000 + i);
    auto [mu, s2] = conditional_moments(*s.stage_one, z, 300, stat);
    if (!(s2 > 0.0)) continue;
    Pmf law = conditional_pmf_given_stage_one(*s.stage_one, z, stat);
    Pmf tp_ref = tp_pmf_window(fit_tp(mu, s2), 1e-12);
    double sigma = std::sqrt(s2);
    DistanceResult tv = total_variation(law, tp_ref);
    DistanceResult loc = local_distance(law, tp_ref);
    CHECK(tv.value <= std::min(4.0 / sigma, 1.0) + tv.uncertainty);
    CHECK(loc.value <= std::min(280.0 / s2, 1.0) + loc.uncertainty);
  }
}

TEST_CASE("decomposition identity and standardized samples") {
  WeightModel z = make_zeta(2.0);
  Decomposition dec = decomposition_estimate(z, 256, Statistic::occupied_boxes(), 4000, 2024);
  CHECK(dec.reps == 4000);

  double combined = dec.se_sigma2 + dec.se_rho2 + dec.se_tau2;
  CHECK(std::abs(dec.sigma2 - dec.rho2 - dec.tau2) <= 4.0 * combined);

  // U standardization: mean zero by construction, unit sample variance
  double mean = 0.0;
  for (double u : dec.u_samples) mean += u;
  mean /= static_cast<double>(dec.u_samples.size());
  CHECK(std::abs(mean) <= 1e-10);
  double var = 0.0;
  for (double u : dec.u_samples) var += (u - mean) * (u - mean);
  var /= static_cast<double>(dec.u_samples.size() - 1);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(decomposition_estimate(z, 256, Statistic::occupied_boxes(), 100, 1),
                  ValidationError);
}

TEST_CASE("decomposition mean matches the moments module") {
  WeightModel z = make_zeta(2.0);
  const std::uint64_t n = 512, reps = 20000;
  Decomposition dec = decomposition_estimate(z, n, Statistic::occupied_boxes(), reps, 777);
  TailProfile tp = tail_profile(z, n);
  Statistic stat = Statistic::occupied_boxes().restricted(tp.tail_start);
  MomentSummary ms = moments(z, n, stat, MomentMode::HybridLargeScale);

  // recompute the replicate mean of W for the comparison
  Pmf law = simulate_statistic_pmf(z, n, stat, reps, 0xabcdef, 2);
  double se_mean = std::sqrt(ms.var / static_cast<double>(reps));
  CHECK(std::abs(law.mean() - ms.mu) <= 4.0 * se_mean + ms.truncation_error);
  // and sigma^2 from the decomposition agrees with the analytic variance
  CHECK(std::abs(dec.sigma2 - ms.var) <= 4.0 * dec.se_sigma2 + ms.truncation_error);
}

TEST_CASE("condition ratios") {
  WeightModel z = make_zeta(2.0);
  Decomposition dec = decomposition_estimate(z, 256, Statistic::occupied_boxes(), 4000, 5);
  ConditionRatios cr = condition_ratios(dec);
  CHECK(cr.nu2_over_rho2 > 0.0);
  CHECK(cr.rho2_over_sigma2 > 0.0);
  CHECK(cr.rho2_over_sigma2 <= 1.0 + 4.0 * cr.se_rho2_over_sigma2);

  Decomposition broken = dec;
  broken.rho2 = 0.0;
  CHECK_THROWS_AS(condition_ratios(broken), DegenerateError);
}

TEST_CASE("simulated statistic law is thread-count independent") {
  WeightModel z = make_zeta(2.0);
  Pmf one = simulate_statistic_pmf(z, 200, Statistic::occupied_boxes(), 20000, 31415, 1);
  Pmf two = simulate_statistic_pmf(z, 200, Statistic::occupied_boxes(), 20000, 31415, 2);
  Pmf four = simulate_statistic_pmf(z, 200, Statistic::occupied_boxes(), 20000, 31415, 4);
  REQUIRE(one.masses.size() == two.masses.size());
  REQUIRE(one.masses.size() == four.masses.size());
  CHECK(one.offset == two.offset);
  for (std::size_t i = 0; i < one.masses.size(); ++i) {
    CHECK(one.masses[i] == two.masses[i]);
    CHECK(one.masses[i] == four.masses[i]);
  }
}

TEST_CASE("simulated law approaches the exact law") {
  WeightModel m = occtp_test::geometric_model();
  Pmf exact = occtp::exact_pmf(m, 30, Statistic::occupied_boxes(), DpConfig{40, 0.0});
  Pmf sim = simulate_statistic_pmf(m, 30, Statistic::occupied_boxes(), 200000, 5961, 2);
  DistanceResult tv = total_variation(exact, sim);
  CHECK(tv.value <= 0.01);  // ~ sqrt(support / samples)
}
