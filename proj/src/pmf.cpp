#include "occtp/pmf.hpp"

#include <cmath>
#include <string>

#include "occtp/errors.hpp"

namespace occtp {

Pmf Pmf::point_mass(std::int64_t k) {
  Pmf p;
  p.offset = k;
  p.masses = {1.0};
  return p;
}

double Pmf::at(std::int64_t k) const {
  if (k < offset) return 0.0;
  std::uint64_t i = static_cast<std::uint64_t>(k - offset);
  return i < masses.size() ? masses[i] : 0.0;
}

double Pmf::table_mass() const {
  double s = 0.0, c = 0.0;
  for (double x : masses) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double Pmf::mean() const {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    double x = masses[i] * (static_cast<double>(offset) + static_cast<double>(i));
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double Pmf::variance() const {
  double m = mean();
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    double d = static_cast<double>(offset) + static_cast<double>(i) - m;
    double x = masses[i] * d * d;
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

void Pmf::trim(double floor_eps) {
  std::size_t lo = 0, hi = masses.size();
  while (hi > lo + 1 && masses[hi - 1] <= floor_eps) {
    tail_defect += masses[hi - 1];
    --hi;
  }
  while (lo + 1 < hi && masses[lo] <= floor_eps) {
    tail_defect += masses[lo];
    ++lo;
  }
  if (lo > 0 || hi < masses.size()) {
    masses = std::vector<double>(masses.begin() + lo, masses.begin() + hi);
    offset += static_cast<std::int64_t>(lo);
  }
}

void Pmf::validate(double tol) const {
  if (masses.empty()) throw ValidationError("pmf: empty mass table");
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] >= 0.0) || !std::isfinite(masses[i])) {
      throw ValidationError("pmf: mass at index " + std::to_string(i) + " is negative or non-finite");
    }
  }
  if (!(tail_defect >= 0.0) || !std::isfinite(tail_defect)) {
    throw ValidationError("pmf: tail defect is negative or non-finite");
  }
  double total = table_mass() + tail_defect;
  if (std::abs(total - 1.0) > tol) {
    throw ValidationError("pmf: table mass + defect is " + std::to_string(total) +
                          ", expected 1 within " + std::to_string(tol));
  }
}

}  // namespace occtp
