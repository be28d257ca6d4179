#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "occtp/errors.hpp"
#include "occtp/metrics.hpp"
#include "occtp/rng.hpp"
#include "occtp/tpoisson.hpp"

using namespace occtp;

namespace {

Pmf random_pmf(Rng& rng, int max_support) {
  Pmf p;
  p.offset = static_cast<std::int64_t>(rng.next_below(7)) - 3;
  std::size_t len = 1 + rng.next_below(static_cast<std::uint64_t>(max_support));
  p.masses.resize(len);
  double total = 0.0;
  for (double& m : p.masses) {
    m = rng.next_double();
    total += m;
  }
  for (double& m : p.masses) m /= total;
  return p;
}

// sup over all events of |P(A) - Q(A)|, by enumerating every subset of the
// union support; the independent oracle for the half-L1 identity
double tv_by_events(const Pmf& p, const Pmf& q) {
  std::int64_t lo = std::min(p.support_min(), q.support_min());
  std::int64_t hi = std::max(p.support_max(), q.support_max());
  std::size_t m = static_cast<std::size_t>(hi - lo + 1);
  REQUIRE(m <= 20);
  double worst = 0.0;
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1ull << i)) {
        std::int64_t k = lo + static_cast<std::int64_t>(i);
        diff += p.at(k) - q.at(k);
      }
    }
    worst = std::max(worst, std::abs(diff));
  }
  return worst;
}

}  // namespace

TEST_CASE("distance basics") {
  Pmf a = Pmf::point_mass(0);
  Pmf b = Pmf::point_mass(1);
  CHECK(total_variation(a, a).value == 0.0);
  CHECK(local_distance(a, a).value == 0.0);
  CHECK(total_variation(a, b).value == doctest::Approx(1.0));

  Pmf half{0, {0.5, 0.5}, 0.0};
  Pmf quarter{0, {0.25, 0.75}, 0.0};
  CHECK(total_variation(half, quarter).value == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(local_distance(half, quarter).value == doctest::Approx(0.25).epsilon(1e-15));

  Pmf poisson3 = tp_pmf_window({0, 3.0}, 1e-12);
  CHECK(local_distance(a, poisson3).value ==
        doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-12));
}

TEST_CASE("total variation equals the sup over events") {
  Rng rng(777);
  for (int i = 0; i < 200; ++i) {
    Pmf p = random_pmf(rng, 9);
    Pmf q = random_pmf(rng, 9);
    double direct = total_variation(p, q).value;
    CHECK(direct == doctest::Approx(tv_by_events(p, q)).epsilon(1e-12));
  }
}

TEST_CASE("metric properties on random triples") {
  Rng rng(12345);
  for (int i = 0; i < 300; ++i) {
    Pmf p = random_pmf(rng, 12);
    Pmf q = random_pmf(rng, 12);
    Pmf r = random_pmf(rng, 12);
    double tv_pq = total_variation(p, q).value;
    double tv_qp = total_variation(q, p).value;
    double loc_pq = local_distance(p, q).value;
    CHECK(tv_pq == doctest::Approx(tv_qp).epsilon(1e-14));
    CHECK(loc_pq == doctest::Approx(local_distance(q, p).value).epsilon(1e-14));
    CHECK(tv_pq <= total_variation(p, r).value + total_variation(r, q).value + 1e-12);
    CHECK(loc_pq <= local_distance(p, r).value + local_distance(r, q).value + 1e-12);
    CHECK(loc_pq >= 0.0);
    CHECK(loc_pq <= 2.0 * tv_pq + 1e-15);
    CHECK(tv_pq >= 0.0);
    CHECK(tv_pq <= 1.0 + 1e-15);
  }
}

TEST_CASE("tail defects feed the uncertainty radius") {
  Pmf p{0, {0.5, 0.45}, 0.05};
  Pmf q{0, {0.6, 0.38}, 0.02};
  DistanceResult tv = total_variation(p, q);
  CHECK(tv.uncertainty == doctest::Approx(0.5 * 0.07).epsilon(1e-15));
  DistanceResult loc = local_distance(p, q);
  CHECK(loc.uncertainty == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("empirical pmf") {
  Pmf point = empirical_pmf({{5, 10}});
  CHECK(point.support_min() == 5);
  CHECK(point.at(5) == 1.0);

  Pmf two = empirical_pmf({{0, 1}, {1, 1}});
  CHECK(two.at(0) == doctest::Approx(0.5));
  CHECK(two.at(1) == doctest::Approx(0.5));

  Pmf gap = empirical_pmf({{2, 3}, {4, 1}});
  CHECK(gap.at(2) == doctest::Approx(0.75));
  CHECK(gap.at(3) == 0.0);
  CHECK(gap.at(4) == doctest::Approx(0.25));
  CHECK(gap.masses.size() == 3);

  CHECK_THROWS_AS(empirical_pmf({}), ValidationError);
}

TEST_CASE("pmf validation") {
  Pmf bad{0, {0.5, 0.4}, 0.0};  // sums to 0.9
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  Pmf neg{0, {1.1, -0.1}, 0.0};
  CHECK_THROWS_AS(neg.validate(), ValidationError);
  Pmf ok{0, {0.5, 0.45}, 0.05};
  CHECK_NOTHROW(ok.validate());
}
