#include "occtp/exactdist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "detail_math.hpp"
#include "occtp/errors.hpp"

namespace occtp {
namespace {

using detail::Kahan;

// window of Binomial(n, p) masses covering everything above `clip`; the
// clipped remainder is returned so the caller can charge it to the defect.
// Built by expanding around the mode, which keeps the recurrence stable for
// any (n, p).
struct BinomWindow {
  std::uint64_t t_lo = 0;
  std::vector<double> mass;
  double clipped = 0.0;
};

BinomWindow binom_window(std::uint64_t n, double p, double clip) {
  BinomWindow w;
  if (n == 0 || p <= 0.0) {
    w.t_lo = 0;
    w.mass = {1.0};
    return w;
  }
  if (p >= 1.0) {
    w.t_lo = n;
    w.mass = {1.0};
    return w;
  }
  const double nd = static_cast<double>(n);
  std::uint64_t mode = static_cast<std::uint64_t>((nd + 1.0) * p);
  mode = std::min(mode, n);
  double log_mode = detail::log_choose(n, mode) + static_cast<double>(mode) * std::log(p) +
                    static_cast<double>(n - mode) * std::log1p(-p);
  double mode_mass = std::exp(log_mode);
  const double odds = p / (1.0 - p);

  std::vector<double> up, down;
  double cur = mode_mass;
  for (std::uint64_t t = mode; t < n;) {
    cur *= static_cast<double>(n - t) / static_cast<double>(t + 1) * odds;
    ++t;
    if (cur <= clip && t > (nd + 1.0) * p) break;
    up.push_back(cur);
  }
  cur = mode_mass;
  std::uint64_t lo = mode;
  while (lo > 0) {
    cur *= static_cast<double>(lo) / (static_cast<double>(n - lo + 1) * odds);
    if (cur <= clip) break;
    --lo;
    down.push_back(cur);
  }
  w.t_lo = lo;
  w.mass.reserve(down.size() + 1 + up.size());
  for (auto it = down.rbegin(); it != down.rend(); ++it) w.mass.push_back(*it);
  w.mass.push_back(mode_mass);
  for (double v : up) w.mass.push_back(v);
  Kahan total;
  for (double v : w.mass) total.add(v);
  w.clipped = std::max(0.0, 1.0 - total.value());
  return w;
}

}  // namespace

Pmf exact_pmf(const WeightModel& model, std::uint64_t n, const Statistic& stat,
              const DpConfig& cfg) {
  if (n < 1) throw ValidationError("exact pmf: n must be >= 1");
  if (cfg.boxes < 1) throw ValidationError("exact pmf: config must resolve at least one box");
  if (!(cfg.prune_eps >= 0.0) || cfg.prune_eps > 1e-9) {
    throw ValidationError("exact pmf: prune_eps must lie in [0, 1e-9]");
  }
  if (stat.kind == Statistic::Kind::ExactlyR &&
      static_cast<std::uint64_t>(stat.exact_count) > n) {
    return Pmf::point_mass(0);
  }
  const std::uint64_t J = cfg.boxes;
  const double tail_hi = model.tail_mass_bounds(J + 1).hi;
  if (static_cast<double>(n) * tail_hi > 0.1) {
    throw ResourceError("exact pmf: n * tail mass past box " + std::to_string(J) +
                        " exceeds 0.1; raise the box count");
  }

  const std::uint64_t start = stat.first_counted_index();
  // structural cap: the count can never exceed the countable boxes or n
  std::uint64_t countable = start > J ? 0 : J - start + 1;
  std::uint64_t k_cap = std::min<std::uint64_t>(n, countable);
  if (stat.kind == Statistic::Kind::ExactlyR) {
    k_cap = std::min(k_cap, n / static_cast<std::uint64_t>(stat.exact_count));
  }
  {
    // Markov cap from the marginal mean; with a 1e-13 ceiling it only ever
    // tightens degenerate corners, the structural cap does the real work
    Kahan mean;
    for (std::uint64_t j = start; j <= J; ++j) {
      double p = model.prob(j);
      if (p <= 0.0) break;
      mean.add(stat.kind == Statistic::Kind::OccupiedBoxes
                   ? detail::occupied_prob(p, static_cast<double>(n))
                   : detail::binom_pmf(n, p, static_cast<std::uint64_t>(stat.exact_count)));
    }
    double markov = std::ceil(mean.value() * 1e13);
    if (markov < static_cast<double>(k_cap)) k_cap = static_cast<std::uint64_t>(markov);
  }

  const std::uint64_t kw = k_cap + 1;             // statistic dimension
  const std::uint64_t mw = n + 1;                 // balls placed so far
  std::vector<double> layer(mw * kw, 0.0), next(mw * kw, 0.0);
  layer[0] = 1.0;  // (m = 0, k = 0)
  double defect = 0.0;
  std::uint64_t m_lo = 0, m_hi = 0, k_hi = 0;

  const double clip = cfg.prune_eps > 0.0
                          ? cfg.prune_eps / (static_cast<double>(n) * static_cast<double>(J))
                          : 0.0;

  for (std::uint64_t j = 1; j <= J; ++j) {
    double remaining = 1.0 - model.cumulative(j - 1);
    double pj = model.prob(j);
    double pt = remaining > 0.0 ? std::clamp(pj / remaining, 0.0, 1.0) : (pj > 0.0 ? 1.0 : 0.0);
    std::fill(next.begin(), next.end(), 0.0);
    std::uint64_t nm_lo = mw, nm_hi = 0, nk_hi = 0;

    // one binomial window per distinct remaining-ball count
    std::uint64_t prev_m = std::numeric_limits<std::uint64_t>::max();
    BinomWindow win;
    for (std::uint64_t m = m_lo; m <= m_hi; ++m) {
      bool row_used = false;
      for (std::uint64_t k = 0; k <= k_hi; ++k) {
        double w = layer[m * kw + k];
        if (w == 0.0) continue;
        if (!row_used) {
          if (m != prev_m) {
            win = binom_window(n - m, pt, clip);
            prev_m = m;
          }
          row_used = true;
        }
        defect += w * win.clipped;
        for (std::size_t i = 0; i < win.mass.size(); ++i) {
          std::uint64_t t = win.t_lo + i;
          std::uint64_t k2 = k + (stat.counts(j, t) ? 1 : 0);
          if (k2 > k_cap) {  // overflow states merge into the defect bucket
            defect += w * win.mass[i];
            continue;
          }
          std::uint64_t m2 = m + t;
          next[m2 * kw + k2] += w * win.mass[i];
          nm_lo = std::min(nm_lo, m2);
          nm_hi = std::max(nm_hi, m2);
          nk_hi = std::max(nk_hi, k2);
        }
      }
    }
    layer.swap(next);
    m_lo = std::min(nm_lo, mw - 1);
    m_hi = nm_hi;
    k_hi = nk_hi;

    if (cfg.prune_eps > 0.0) {
      for (std::uint64_t m = m_lo; m <= m_hi; ++m) {
        for (std::uint64_t k = 0; k <= k_hi; ++k) {
          double& w = layer[m * kw + k];
          if (w != 0.0 && w < cfg.prune_eps) {
            defect += w;
            w = 0.0;
          }
        }
      }
    }

    // layer mass conservation; tolerance scales with the boxes processed
    Kahan total;
    for (std::uint64_t m = m_lo; m <= m_hi; ++m) {
      for (std::uint64_t k = 0; k <= k_hi; ++k) total.add(layer[m * kw + k]);
    }
    double tol = 1e-11 * (1.0 + static_cast<double>(j) / 1000.0);
    if (std::abs(total.value() + defect - 1.0) > tol) {
      throw std::runtime_error("exact pmf: mass conservation violated at box " +
                               std::to_string(j));
    }
  }

  // states that still have unplaced balls resolve beyond box J: unknown final
  // count, charge them to the defect
  Pmf out;
  out.offset = 0;
  out.masses.assign(k_cap + 1, 0.0);
  for (std::uint64_t m = m_lo; m <= m_hi; ++m) {
    for (std::uint64_t k = 0; k <= k_hi; ++k) {
      double w = layer[m * kw + k];
      if (w == 0.0) continue;
      if (m == n) {
        out.masses[k] += w;
      } else {
        defect += w;
      }
    }
  }
  out.tail_defect = defect;
  out.trim(0.0);
  return out;
}

Pmf enumerate_pmf(const WeightModel& model, std::uint64_t n, const Statistic& stat) {
  auto support = model.finite_support();
  if (!support) throw ResourceError("enumeration needs a finite (explicit) model");
  const std::uint64_t J = *support;
  double combos = std::pow(static_cast<double>(J), static_cast<double>(n));
  if (combos > 1e7) {
    throw ResourceError("enumeration guard: J^n = " + std::to_string(combos) + " exceeds 1e7");
  }
  if (n < 1) throw ValidationError("enumeration: n must be >= 1");

  std::vector<std::uint32_t> assign(n, 0);  // box of each labeled ball (0-based)
  std::vector<std::uint32_t> counts(J, 0);
  std::uint64_t max_k = std::min<std::uint64_t>(n, J);
  std::vector<double> mass(max_k + 1, 0.0);
  std::vector<double> comp(max_k + 1, 0.0);

  while (true) {
    std::fill(counts.begin(), counts.end(), 0);
    double prob = 1.0;
    for (std::uint64_t b = 0; b < n; ++b) {
      counts[assign[b]] += 1;
      prob *= model.prob(assign[b] + 1);
    }
    std::uint64_t k = 0;
    for (std::uint64_t j = 0; j < J; ++j) {
      if (counts[j] > 0 && stat.counts(j + 1, counts[j])) ++k;
    }
    double y = prob - comp[k];
    double t = mass[k] + y;
    comp[k] = (t - mass[k]) - y;
    mass[k] = t;

    std::uint64_t b = 0;
    while (b < n && assign[b] + 1 == J) {
      assign[b] = 0;
      ++b;
    }
    if (b == n) break;
    assign[b] += 1;
  }

  Pmf out;
  out.offset = 0;
  out.masses = std::move(mass);
  out.tail_defect = 0.0;
  out.trim(0.0);
  return out;
}

Pmf poissonized_pmf(const WeightModel& model, std::uint64_t n, const Statistic& stat,
                    std::uint64_t boxes) {
  if (n < 1) throw ValidationError("poissonized pmf: n must be >= 1");
  const double nd = static_cast<double>(n);
  const std::uint64_t start = stat.first_counted_index();
  const std::uint64_t r = stat.kind == Statistic::Kind::ExactlyR
                              ? static_cast<std::uint64_t>(stat.exact_count)
                              : 0;
  auto success = [&](double p) {
    double np = nd * p;
    return stat.kind == Statistic::Kind::OccupiedBoxes ? -std::expm1(-np)
                                                       : detail::poisson_pmf(np, r);
  };

  std::vector<double> conv{1.0};
  double trimmed = 0.0;
  for (std::uint64_t j = start; j <= boxes; ++j) {
    double p = model.prob(j);
    if (p <= 0.0) break;
    double pi = success(p);
    if (pi <= 0.0) continue;
    conv.push_back(0.0);
    for (std::size_t k = conv.size() - 1; k > 0; --k) {
      conv[k] = conv[k] * (1.0 - pi) + conv[k - 1] * pi;
    }
    conv[0] *= 1.0 - pi;
    while (conv.size() > 1 && conv.back() < 1e-18) {
      trimmed += conv.back();
      conv.pop_back();
    }
    if (conv.size() > (1ull << 22)) {
      throw ResourceError("poissonized pmf: support exceeded 4e6 entries");
    }
  }

  // condition on "no counted success past the cutoff": scale by the certified
  // probability of that event so table + defect is exactly one
  double scale = 1.0;
  if (model.kind() == WeightModel::Kind::ZetaPowerLaw) {
    std::uint64_t from = std::max(start, boxes + 1);
    Interval log_none = detail::tail_sum_power_law(
        model, from, [&](double p) { return -std::log1p(-std::min(success(p), 1.0 - 1e-15)); },
        detail::constant_unit_cap(2.0 * nd));
    scale = std::exp(-log_none.mid());
  } else if (auto support = model.finite_support(); *support > boxes) {
    Kahan log_none;
    for (std::uint64_t j = std::max(start, boxes + 1); j <= *support; ++j) {
      log_none.add(-std::log1p(-std::min(success(model.prob(j)), 1.0 - 1e-15)));
    }
    scale = std::exp(-log_none.value());
  }

  Pmf out;
  out.offset = 0;
  out.masses.resize(conv.size());
  Kahan table;
  for (std::size_t k = 0; k < conv.size(); ++k) {
    out.masses[k] = conv[k] * scale;
    table.add(out.masses[k]);
  }
  out.tail_defect = std::max(0.0, 1.0 - table.value());
  out.trim(0.0);
  return out;
}

double low_boxes_all_occupied(const WeightModel& model, std::uint64_t n, std::uint32_t k) {
  if (k < 1) throw ValidationError("low boxes: k must be >= 1");
  if (k > 25) throw ResourceError("low boxes: inclusion-exclusion guarded at k = 25");
  if (n < 1) throw ValidationError("low boxes: n must be >= 1");
  std::vector<double> p(k);
  for (std::uint32_t i = 0; i < k; ++i) p[i] = model.prob(i + 1);

  // Gray-code walk over subsets keeps the running sum to one update per step
  const double nd = static_cast<double>(n);
  Kahan acc;
  acc.add(1.0);  // empty subset
  double sum = 0.0;
  std::uint32_t gray = 0;
  for (std::uint64_t i = 1; i < (1ull << k); ++i) {
    std::uint32_t bit = static_cast<std::uint32_t>(std::countr_zero(i));
    std::uint32_t next_gray = static_cast<std::uint32_t>(i ^ (i >> 1));
    if (next_gray & (1u << bit)) {
      sum += p[bit];
    } else {
      sum -= p[bit];
    }
    gray = next_gray;
    double sign = (std::popcount(gray) & 1u) ? -1.0 : 1.0;
    double rest = std::max(0.0, 1.0 - std::min(sum, 1.0));
    acc.add(sign * std::pow(rest, nd));
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

}  // namespace occtp
