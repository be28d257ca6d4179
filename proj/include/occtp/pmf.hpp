#pragma once

#include <cstdint>
#include <vector>

namespace occtp {

// Integer-supported mass function: a dense table starting at `offset` plus the
// mass certified to lie outside the table. Every distance computed from a Pmf
// can therefore carry an honest error bar.
struct Pmf {
  std::int64_t offset = 0;
  std::vector<double> masses;
  double tail_defect = 0.0;

  static Pmf point_mass(std::int64_t k);

  std::int64_t support_min() const { return offset; }
  std::int64_t support_max() const {
    return offset + static_cast<std::int64_t>(masses.size()) - 1;
  }

  double at(std::int64_t k) const;

  // compensated sum of the table
  double table_mass() const;

  // moments of the table part (defect ignored)
  double mean() const;
  double variance() const;

  // drop leading/trailing entries below `floor_eps`, charging them to the defect
  void trim(double floor_eps = 0.0);

  // throws ValidationError when the invariants fail
  void validate(double tol = 1e-9) const;
};

}  // namespace occtp
