#include "occtp/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "occtp/errors.hpp"

namespace occtp {

DistanceResult total_variation(const Pmf& p, const Pmf& q) {
  p.validate();
  q.validate();
  std::int64_t lo = std::min(p.support_min(), q.support_min());
  std::int64_t hi = std::max(p.support_max(), q.support_max());
  double s = 0.0, c = 0.0;
  for (std::int64_t k = lo; k <= hi; ++k) {
    double x = std::abs(p.at(k) - q.at(k));
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return {0.5 * s, 0.5 * (p.tail_defect + q.tail_defect)};
}

DistanceResult local_distance(const Pmf& p, const Pmf& q) {
  p.validate();
  q.validate();
  std::int64_t lo = std::min(p.support_min(), q.support_min());
  std::int64_t hi = std::max(p.support_max(), q.support_max());
  double worst = 0.0;
  for (std::int64_t k = lo; k <= hi; ++k) {
    worst = std::max(worst, std::abs(p.at(k) - q.at(k)));
  }
  return {worst, std::max(p.tail_defect, q.tail_defect)};
}

Pmf empirical_pmf(const std::map<std::int64_t, std::uint64_t>& counts) {
  if (counts.empty()) throw ValidationError("empirical pmf: no observations");
  std::uint64_t total = 0;
  for (const auto& [k, c] : counts) total += c;
  if (total == 0) throw ValidationError("empirical pmf: no observations");
  std::int64_t lo = counts.begin()->first;
  std::int64_t hi = counts.rbegin()->first;
  Pmf p;
  p.offset = lo;
  p.masses.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [k, c] : counts) {
    p.masses[static_cast<std::size_t>(k - lo)] =
        static_cast<double>(c) / static_cast<double>(total);
  }
  return p;
}

}  // namespace occtp
