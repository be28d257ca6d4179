#pragma once

#include <cstdint>
#include <optional>

#include "occtp/errors.hpp"

namespace occtp {

// Which box-count summary to evaluate: the number of occupied boxes, or the
// number of boxes holding exactly `exact_count` balls. When `restricted_from`
// is set, only boxes with index >= that value are counted.
struct Statistic {
  enum class Kind { OccupiedBoxes, ExactlyR };

  Kind kind = Kind::OccupiedBoxes;
  int exact_count = 0;
  std::optional<std::uint64_t> restricted_from;

  static Statistic occupied_boxes() { return Statistic{Kind::OccupiedBoxes, 0, {}}; }

  static Statistic exactly(int r) {
    if (r < 1) throw ValidationError("statistic: exact ball count r must be >= 1");
    return Statistic{Kind::ExactlyR, r, {}};
  }

  Statistic restricted(std::uint64_t first_index) const {
    Statistic s = *this;
    s.restricted_from = first_index;
    return s;
  }

  std::uint64_t first_counted_index() const { return restricted_from.value_or(1); }

  bool counts(std::uint64_t box_index, std::uint64_t balls) const {
    if (box_index < first_counted_index()) return false;
    if (kind == Kind::OccupiedBoxes) return balls >= 1;
    return balls == static_cast<std::uint64_t>(exact_count);
  }
};

}  // namespace occtp
