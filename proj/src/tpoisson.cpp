#include "occtp/tpoisson.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "occtp/errors.hpp"

namespace occtp {

TranslatedPoisson fit_tp(double mu, double var) {
  if (!std::isfinite(mu) || !std::isfinite(var)) {
    throw ValidationError("tp fit: mu and var must be finite");
  }
  if (var < 0.0) throw ValidationError("tp fit: var must be nonnegative");
  TranslatedPoisson tp;
  tp.shift = static_cast<std::int64_t>(std::floor(mu - var));
  tp.rate = mu - static_cast<double>(tp.shift);
  return tp;
}

double tp_pmf(const TranslatedPoisson& tp, std::int64_t k) {
  if (k < tp.shift) return 0.0;
  double m = static_cast<double>(k - tp.shift);
  if (tp.rate == 0.0) return k == tp.shift ? 1.0 : 0.0;
  // log space throughout; direct products overflow long before m ~ 1e2
  return std::exp(m * std::log(tp.rate) - tp.rate - std::lgamma(m + 1.0));
}

Pmf tp_pmf_window(const TranslatedPoisson& tp, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw ValidationError("tp window: eps must lie in (0, 1)");
  if (tp.rate == 0.0) {
    return Pmf::point_mass(tp.shift);
  }
  const double lambda = tp.rate;
  const std::uint64_t kMaxWindow = 100'000'000;
  // a coverage of 1 - eps needs roughly +-sqrt(2 ln(1/eps)) standard
  // deviations; refuse absurd requests before allocating anything
  double predicted = 2.0 * std::sqrt(2.0 * std::log(1.0 / eps) * (lambda + 1.0)) + 64.0;
  if (predicted > static_cast<double>(kMaxWindow)) {
    throw ResourceError("tp window: support would exceed 1e8 entries; rate too large for this eps");
  }
  // grow greedily from the mode; for a unimodal pmf this yields the smallest
  // contiguous window of the requested coverage
  std::int64_t mode = static_cast<std::int64_t>(std::floor(lambda));
  double mode_mass = std::exp(static_cast<double>(mode) * std::log(lambda) - lambda -
                              std::lgamma(static_cast<double>(mode) + 1.0));
  std::deque<double> window{mode_mass};
  std::int64_t lo = mode, hi = mode;        // Poisson part indices (shift removed)
  double lo_mass = mode_mass, hi_mass = mode_mass;
  double acc = mode_mass, comp = 0.0;       // compensated coverage sum
  auto accumulate = [&](double mass) {
    double y = mass - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  };
  while (acc < 1.0 - eps) {
    if (window.size() >= kMaxWindow) {
      throw ResourceError("tp window: support exceeds 1e8 entries; rate too large for this eps");
    }
    double next_lo = lo > 0 ? lo_mass * static_cast<double>(lo) / lambda : 0.0;
    double next_hi = hi_mass * lambda / static_cast<double>(hi + 1);
    if (lo > 0 && next_lo >= next_hi) {
      --lo;
      lo_mass = next_lo;
      window.push_front(lo_mass);
      accumulate(lo_mass);
    } else {
      ++hi;
      hi_mass = next_hi;
      window.push_back(hi_mass);
      accumulate(hi_mass);
    }
    if (next_lo == 0.0 && next_hi == 0.0) break;  // underflow guard
  }
  Pmf p;
  p.offset = tp.shift + lo;
  p.masses.assign(window.begin(), window.end());
  p.tail_defect = std::max(0.0, 1.0 - acc);
  return p;
}

}  // namespace occtp
