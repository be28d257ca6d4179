#include "occtp/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "detail_math.hpp"
#include "occtp/errors.hpp"

namespace occtp {
namespace {

using detail::binom_pmf;
using detail::iv_add;
using detail::iv_max0;
using detail::iv_mul_nn;
using detail::iv_point;
using detail::iv_scale;
using detail::iv_sub;
using detail::Kahan;
using detail::occupied_prob;
using detail::pow_one_minus;
using detail::tail_sum_power_law;

constexpr std::uint64_t kPairwiseGuard = 5000;
constexpr std::uint64_t kBigBoxes = 2000;   // exact pairwise core of the hybrid

double clamp_p(double p) { return std::min(p, 1.0 - 1e-15); }

// Cov(I[N_j >= 1], I[N_s >= 1]) = A_j A_s expm1(n log(1 - g)) with
// A = (1-p)^n and g = h_j h_s, h = p/(1-p). The expm1 form avoids the
// cancellation of the textbook difference of n-th powers.
double occupied_pair_cov(double pj, double ps, double n) {
  double la = n * (std::log1p(-pj) + std::log1p(-ps));
  double g = (pj / (1.0 - pj)) * (ps / (1.0 - ps));
  double arg = g >= 1.0 ? -std::numeric_limits<double>::infinity() : n * std::log1p(-g);
  return std::exp(la) * std::expm1(arg);
}

// log of (n-r)_r / (n)_r, the ratio of the joint to the squared marginal
// normalization for the exactly-r kernel
double kappa_log(std::uint64_t n, int r) {
  double s = 0.0;
  for (int i = 0; i < r; ++i) {
    s += std::log(static_cast<double>(n - r - i)) - std::log(static_cast<double>(n - i));
  }
  return s;
}

// Cov(I[N_j = r], I[N_s = r]) for n >= 2r, in the same expm1 form
double exactly_pair_cov(std::uint64_t n, int r, double pj, double ps, double zj, double zs,
                        double klog) {
  if (zj == 0.0 || zs == 0.0) return 0.0;
  double lam = -(std::log1p(-pj) + std::log1p(-ps));
  double g = (pj / (1.0 - pj)) * (ps / (1.0 - ps));
  double nm2r = static_cast<double>(n) - 2.0 * r;
  double arg = klog + r * lam +
               (g >= 1.0 ? (nm2r > 0 ? -std::numeric_limits<double>::infinity() : 0.0)
                         : nm2r * std::log1p(-g));
  return zj * zs * std::expm1(arg);
}

// enclosure of sum_{j≠s, not both big} u_j u_s (all values nonnegative)
Interval pair_sum_rest(const Interval& s_all, const Interval& d_all, double s_big, double d_big) {
  Interval all = iv_sub(iv_mul_nn(s_all, s_all), d_all);
  Interval big = iv_point(s_big * s_big - d_big);
  return iv_max0(iv_sub(all, big));
}

// enclosure of sum_{j≠s, not both big} (a_j b_s + a_s b_j)
Interval pair_sum_rest_mixed(const Interval& sa_all, const Interval& sb_all, const Interval& c_all,
                             double sa_big, double sb_big, double c_big) {
  Interval all = iv_sub(iv_mul_nn(sa_all, sb_all), c_all);
  Interval big = iv_point(sa_big * sb_big - c_big);
  return iv_scale(2.0, iv_max0(iv_sub(all, big)));
}

struct RangePlan {
  std::uint64_t start;     // first counted index
  std::uint64_t cut;       // last exactly summed index (0 = empty range)
  std::uint64_t big_end;   // last index of the exact pairwise core, <= cut
  bool has_tail;           // power law mass continues past `cut`
};

RangePlan plan_range(const WeightModel& model, std::uint64_t n, const Statistic& stat,
                     std::uint64_t requested_cut) {
  RangePlan plan{};
  plan.start = stat.first_counted_index();
  if (auto support = model.finite_support(); support.has_value()) {
    plan.cut = std::min(requested_cut, *support);
    plan.has_tail = requested_cut < *support;  // only when explicitly truncated
  } else {
    // push the exact part past the point where every summed sequence is
    // monotone in p, so the bracketed tail is valid
    double knee_p = 1.0 / (8.0 * static_cast<double>(n) * (stat.exact_count + 2.0));
    double a = model.exponent();
    double knee_j = std::pow(1.0 / (knee_p * model.zeta_constant()), 1.0 / a);
    std::uint64_t cut = std::max<std::uint64_t>(1ull << 20, static_cast<std::uint64_t>(knee_j) + 2);
    if (cut > (1ull << 24)) {
      throw ResourceError("moments: power-law exact range exceeds 2^24 boxes for these parameters");
    }
    plan.cut = std::min(requested_cut, cut);
    plan.has_tail = true;
  }
  if (plan.cut < plan.start) plan.cut = plan.start - 1;  // empty range
  plan.big_end = plan.cut == plan.start - 1
                     ? plan.cut
                     : std::min(plan.cut, plan.start + kBigBoxes - 1);
  return plan;
}

// ---- occupied boxes --------------------------------------------------------

struct OccupiedSums {
  Interval q, q2, f, f2, x, x2;                    // start..infinity
  double q_b = 0, q2_b = 0, f_b = 0, f2_b = 0, x_b = 0, x2_b = 0;  // big core
};

OccupiedSums occupied_sums(const WeightModel& model, std::uint64_t n, const RangePlan& plan) {
  const double nd = static_cast<double>(n);
  Kahan q, q2, f, f2, x, x2;
  OccupiedSums out;
  bool snapped = false;
  auto snapshot = [&] {
    out.q_b = q.value(); out.q2_b = q2.value();
    out.f_b = f.value(); out.f2_b = f2.value();
    out.x_b = x.value(); out.x2_b = x2.value();
    snapped = true;
  };
  for (std::uint64_t j = plan.start; j <= plan.cut; ++j) {
    double p = model.prob(j);
    if (p <= 0.0) break;
    double qv = occupied_prob(p, nd);
    double fv = p * pow_one_minus(p, nd - 1.0);
    double xv = n >= 2 ? p * p * pow_one_minus(p, nd - 2.0) : 0.0;
    q.add(qv); q2.add(qv * qv);
    f.add(fv); f2.add(fv * fv);
    x.add(xv); x2.add(xv * xv);
    if (j == plan.big_end) snapshot();
  }
  if (!snapped) snapshot();
  out.q = iv_point(q.value());
  out.q2 = iv_point(q2.value());
  out.f = iv_point(f.value());
  out.f2 = iv_point(f2.value());
  out.x = iv_point(x.value());
  out.x2 = iv_point(x2.value());
  if (plan.has_tail && model.kind() == WeightModel::Kind::ZetaPowerLaw) {
    std::uint64_t from = plan.cut + 1;
    auto add_tail = [&](Interval& dst, const std::function<double(double)>& g,
                        const std::function<double(double)>& unit_cap) {
      dst = iv_add(dst, tail_sum_power_law(model, from, g, unit_cap));
    };
    add_tail(out.q, [&](double p) { return occupied_prob(p, nd); },
             detail::constant_unit_cap(nd));
    add_tail(out.q2, [&](double p) { double v = occupied_prob(p, nd); return v * v; },
             [&](double pe) { return nd * std::min(nd * pe, 1.0); });
    add_tail(out.f, [&](double p) { return p * pow_one_minus(p, nd - 1.0); },
             detail::constant_unit_cap(1.0));
    add_tail(out.f2, [&](double p) { double v = p * pow_one_minus(p, nd - 1.0); return v * v; },
             [](double pe) { return pe; });
    if (n >= 2) {
      add_tail(out.x, [&](double p) { return p * p * pow_one_minus(p, nd - 2.0); },
               [](double pe) { return pe; });
      add_tail(out.x2, [&](double p) { double v = p * p * pow_one_minus(p, nd - 2.0); return v * v; },
               [](double pe) { return pe * pe * pe; });
    }
  }
  return out;
}

MomentSummary occupied_moments(const WeightModel& model, std::uint64_t n, const RangePlan& plan,
                               MomentMode mode) {
  const double nd = static_cast<double>(n);
  OccupiedSums s = occupied_sums(model, n, plan);

  Interval mu = s.q;
  Interval var = iv_sub(s.q, s.q2);  // sum q(1-q)

  // exact pairwise covariances over the big core
  Kahan big_pairs;
  for (std::uint64_t j = plan.start; j + 1 <= plan.big_end && j <= plan.big_end; ++j) {
    double pj = model.prob(j);
    if (pj <= 0.0) break;
    for (std::uint64_t t = j + 1; t <= plan.big_end; ++t) {
      double pt = model.prob(t);
      if (pt <= 0.0) break;
      big_pairs.add(2.0 * occupied_pair_cov(clamp_p(pj), clamp_p(pt), nd));
    }
  }
  var = iv_add(var, iv_point(big_pairs.value()));

  // first-order separable form over the remaining pairs, with a certified
  // second-order bound
  bool have_rest = plan.has_tail ||
                   (model.finite_support().value_or(0) > plan.big_end && plan.cut > plan.big_end);
  if (have_rest && plan.big_end >= plan.start) {
    Interval rest_ff = pair_sum_rest(s.f, s.f2, s.f_b, s.f2_b);
    var = iv_add(var, iv_scale(-nd, rest_ff));

    double h_top = clamp_p(model.prob(plan.start));
    h_top = h_top / (1.0 - h_top);
    double p_small = clamp_p(model.prob(plan.big_end + 1));
    double h_small = p_small / (1.0 - p_small);
    double gstar = h_top * h_small;
    if (gstar >= 0.5) {
      throw ResourceError("moments: model too concentrated for the hybrid pair bound");
    }
    double factor = nd * nd / (2.0 * (1.0 - gstar) * (1.0 - gstar)) + nd / (2.0 * (1.0 - gstar));
    double err = factor * pair_sum_rest(s.x, s.x2, s.x_b, s.x2_b).hi;
    var = {var.lo - err, var.hi + err};
  }

  MomentSummary out;
  out.mode = mode;
  out.mu = mu.mid();
  out.var = var.mid();
  out.truncation_error = std::max(mu.half_width(), var.half_width());
  return out;
}

// ---- exactly r balls -------------------------------------------------------

struct ExactlySums {
  // z, z^2, z*lam, z^2*lam, z*h, (z*h)^2, zt = z/(1-p)^r, zt^2, zt*lam^2,
  // zt^2*lam^2, zt*h^2, (zt*h^2)^2
  Interval z, z2, zl, z2l, zh, zh2, t0, t02, t1, t12, t2, t22;
  double z_b = 0, z2_b = 0, zl_b = 0, z2l_b = 0, zh_b = 0, zh2_b = 0;
  double t0_b = 0, t02_b = 0, t1_b = 0, t12_b = 0, t2_b = 0, t22_b = 0;
};

ExactlySums exactly_sums(const WeightModel& model, std::uint64_t n, int r, const RangePlan& plan) {
  Kahan z, z2, zl, z2l, zh, zh2, t0, t02, t1, t12, t2, t22;
  ExactlySums out;
  bool snapped = false;
  auto snapshot = [&] {
    out.z_b = z.value(); out.z2_b = z2.value(); out.zl_b = zl.value(); out.z2l_b = z2l.value();
    out.zh_b = zh.value(); out.zh2_b = zh2.value(); out.t0_b = t0.value(); out.t02_b = t02.value();
    out.t1_b = t1.value(); out.t12_b = t12.value(); out.t2_b = t2.value(); out.t22_b = t22.value();
    snapped = true;
  };
  const double lc = detail::log_choose(n, static_cast<std::uint64_t>(r));
  auto eval = [&, lc](double p, double* vals) {
    double pc = clamp_p(p);
    double zv = p >= 1.0 ? (static_cast<std::uint64_t>(r) == n ? 1.0 : 0.0)
                         : std::exp(lc + r * std::log(p) +
                                    (static_cast<double>(n) - r) * std::log1p(-p));
    double lam = -std::log1p(-pc);
    double h = pc / (1.0 - pc);
    double zt = zv * std::exp(r * lam);
    vals[0] = zv; vals[1] = zv * zv; vals[2] = zv * lam; vals[3] = zv * zv * lam;
    vals[4] = zv * h; vals[5] = zv * h * zv * h;
    vals[6] = zt; vals[7] = zt * zt; vals[8] = zt * lam * lam; vals[9] = zt * zt * lam * lam;
    vals[10] = zt * h * h; vals[11] = zt * h * h * zt * h * h;
  };
  for (std::uint64_t j = plan.start; j <= plan.cut; ++j) {
    double p = model.prob(j);
    if (p <= 0.0) break;
    double v[12];
    eval(p, v);
    z.add(v[0]); z2.add(v[1]); zl.add(v[2]); z2l.add(v[3]); zh.add(v[4]); zh2.add(v[5]);
    t0.add(v[6]); t02.add(v[7]); t1.add(v[8]); t12.add(v[9]); t2.add(v[10]); t22.add(v[11]);
    if (j == plan.big_end) snapshot();
  }
  if (!snapped) snapshot();
  out.z = iv_point(z.value()); out.z2 = iv_point(z2.value());
  out.zl = iv_point(zl.value()); out.z2l = iv_point(z2l.value());
  out.zh = iv_point(zh.value()); out.zh2 = iv_point(zh2.value());
  out.t0 = iv_point(t0.value()); out.t02 = iv_point(t02.value());
  out.t1 = iv_point(t1.value()); out.t12 = iv_point(t12.value());
  out.t2 = iv_point(t2.value()); out.t22 = iv_point(t22.value());
  if (plan.has_tail && model.kind() == WeightModel::Kind::ZetaPowerLaw) {
    std::uint64_t from = plan.cut + 1;
    // per-unit-mass bound on the kernel: z / p <= min(n, C(n,r) p^(r-1))
    auto zc = [&, lc](double pe) {
      double lg = lc + (r - 1.0) * std::log(pe);
      return lg > std::log(static_cast<double>(n)) ? static_cast<double>(n) : std::exp(lg);
    };
    auto caps = [&](int k) -> std::function<double(double)> {
      return [&, k](double pe) {
        double lam = -std::log1p(-pe);
        double h = pe / (1.0 - pe);
        double tilt = std::exp(r * lam);                // (1-p)^-r
        double z_unit = zc(pe);                         // z / p
        double z_edge = std::min(1.0, z_unit * pe);     // z itself
        switch (k) {
          case 0: return z_unit;
          case 1: return z_edge * z_unit;
          case 2: return lam * z_unit;
          case 3: return z_edge * lam * z_unit;
          case 4: return h * z_unit;
          case 5: return z_edge * h * h * z_unit;
          case 6: return tilt * z_unit;
          case 7: return z_edge * tilt * tilt * z_unit;
          case 8: return lam * lam * tilt * z_unit;
          case 9: return z_edge * lam * lam * tilt * tilt * z_unit;
          case 10: return h * h * tilt * z_unit;
          case 11: return z_edge * h * h * h * h * tilt * tilt * z_unit;
        }
        return static_cast<double>(n);
      };
    };
    Interval* dst[12] = {&out.z, &out.z2, &out.zl, &out.z2l, &out.zh, &out.zh2,
                         &out.t0, &out.t02, &out.t1, &out.t12, &out.t2, &out.t22};
    for (int k = 0; k < 12; ++k) {
      auto g = [&, k](double p) {
        double v[12];
        eval(p, v);
        return v[k];
      };
      *dst[k] = iv_add(*dst[k], tail_sum_power_law(model, from, g, caps(k)));
    }
  }
  return out;
}

MomentSummary exactly_moments(const WeightModel& model, std::uint64_t n, int r,
                              const RangePlan& plan, MomentMode mode) {
  const double nd = static_cast<double>(n);
  ExactlySums s = exactly_sums(model, n, r, plan);

  Interval mu = s.z;
  Interval var = iv_sub(s.z, s.z2);

  if (n < 2ull * static_cast<std::uint64_t>(r)) {
    // two boxes cannot both hold r balls: every pairwise covariance is
    // exactly -z_j z_s, which sums in closed form
    Interval all_pairs = iv_max0(iv_sub(iv_mul_nn(s.z, s.z), s.z2));
    var = iv_sub(var, all_pairs);
  } else {
    double klog = kappa_log(n, r);
    Kahan big_pairs;
    for (std::uint64_t j = plan.start; j + 1 <= plan.big_end && j <= plan.big_end; ++j) {
      double pj = model.prob(j);
      if (pj <= 0.0) break;
      double zj = binom_pmf(n, pj, static_cast<std::uint64_t>(r));
      for (std::uint64_t t = j + 1; t <= plan.big_end; ++t) {
        double pt = model.prob(t);
        if (pt <= 0.0) break;
        double zt = binom_pmf(n, pt, static_cast<std::uint64_t>(r));
        big_pairs.add(2.0 * exactly_pair_cov(n, r, clamp_p(pj), clamp_p(pt), zj, zt, klog));
      }
    }
    var = iv_add(var, iv_point(big_pairs.value()));

    bool have_rest = plan.has_tail ||
                     (model.finite_support().value_or(0) > plan.big_end && plan.cut > plan.big_end);
    if (have_rest && plan.big_end >= plan.start) {
      double nm2r = nd - 2.0 * r;
      // linearized covariance: z_j z_s (klog + r(lam_j + lam_s) - (n-2r) h_j h_s)
      Interval lin = iv_scale(klog, pair_sum_rest(s.z, s.z2, s.z_b, s.z2_b));
      lin = iv_add(lin, iv_scale(static_cast<double>(r),
                                 pair_sum_rest_mixed(s.zl, s.z, s.z2l, s.zl_b, s.z_b, s.z2l_b)));
      lin = iv_add(lin, iv_scale(-nm2r, pair_sum_rest(s.zh, s.zh2, s.zh_b, s.zh2_b)));
      var = iv_add(var, lin);

      double h_top = clamp_p(model.prob(plan.start));
      h_top = h_top / (1.0 - h_top);
      double p_small = clamp_p(model.prob(plan.big_end + 1));
      double h_small = p_small / (1.0 - p_small);
      double gstar = h_top * h_small;
      if (gstar >= 0.5) {
        throw ResourceError("moments: model too concentrated for the hybrid pair bound");
      }
      double blow = std::exp(std::abs(klog) + nm2r * gstar / (1.0 - gstar));
      double p_t0 = pair_sum_rest(s.t0, s.t02, s.t0_b, s.t02_b).hi;
      double p_t1 = pair_sum_rest_mixed(s.t1, s.t0, s.t12, s.t1_b, s.t0_b, s.t12_b).hi;
      double p_t2 = pair_sum_rest(s.t2, s.t22, s.t2_b, s.t22_b).hi;
      double err = nm2r / (2.0 * (1.0 - gstar)) * p_t2 +
                   0.5 * blow *
                       (3.0 * klog * klog * p_t0 + 6.0 * r * r * p_t1 +
                        3.0 * nm2r * nm2r / ((1.0 - gstar) * (1.0 - gstar)) * p_t2);
      var = {var.lo - err, var.hi + err};
    }
  }

  MomentSummary out;
  out.mode = mode;
  out.mu = mu.mid();
  out.var = var.mid();
  out.truncation_error = std::max(mu.half_width(), var.half_width());
  return out;
}

// smallest exact-sum end for the full pairwise mode
std::uint64_t exact_pair_cut(const WeightModel& model, std::uint64_t n) {
  if (auto J = model.finite_support()) return *J;
  const double budget = 1e-12 / static_cast<double>(n);
  std::uint64_t hi = 2;
  while (model.tail_mass_bounds(hi + 1).hi > budget) {
    if (hi > (1ull << 50)) break;
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (model.tail_mass_bounds(mid + 1).hi <= budget) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

MomentSummary moments(const WeightModel& model, std::uint64_t n, const Statistic& stat,
                      MomentMode mode) {
  if (n < 1) throw ValidationError("moments: n must be >= 1");
  if (stat.kind == Statistic::Kind::ExactlyR &&
      static_cast<std::uint64_t>(stat.exact_count) > n) {
    throw ValidationError("moments: exactly-r statistic requires n >= r");
  }

  RangePlan plan{};
  bool truncated_tail = false;
  if (mode == MomentMode::ExactPairwise) {
    std::uint64_t cut = exact_pair_cut(model, n);
    if (cut > kPairwiseGuard) {
      throw ResourceError(
          "moments: exact pairwise mode needs " + std::to_string(cut) +
          " boxes (> 5000); use HybridLargeScale");
    }
    plan.start = stat.first_counted_index();
    plan.cut = cut < plan.start ? plan.start - 1 : cut;
    plan.big_end = plan.cut;  // everything is in the exact core
    plan.has_tail = false;    // the cut itself is charged below
    truncated_tail = !model.finite_support().has_value();
  } else {
    plan = plan_range(model, n, stat, std::numeric_limits<std::uint64_t>::max());
  }

  MomentSummary out = stat.kind == Statistic::Kind::OccupiedBoxes
                          ? occupied_moments(model, n, plan, mode)
                          : exactly_moments(model, n, stat.exact_count, plan, mode);

  if (truncated_tail) {
    // boxes past the cut: mean moves by at most n*T, variance by the
    // Cauchy-Schwarz cross term as well
    double nt = static_cast<double>(n) * model.tail_mass_bounds(plan.cut + 1).hi;
    double var_slack = nt + nt * nt + 2.0 * std::sqrt(std::max(out.var, 0.0) * (nt + nt * nt));
    out.truncation_error += std::max(nt, var_slack);
  }
  return out;
}

double mu_hat_r(const WeightModel& model, std::uint64_t n, int r) {
  if (r < 1) throw ValidationError("mu_hat: r must be >= 1");
  if (n < 3) throw ValidationError("mu_hat: n must be >= 3");
  TailProfile tp = tail_profile(model, n);
  const double nd = static_cast<double>(n);
  const double lgr = std::lgamma(static_cast<double>(r) + 1.0);
  auto term = [&](double p) {
    if (p <= 0.0) return 0.0;
    double np = nd * p;
    return std::exp(r * std::log(np) - np - lgr);
  };
  Statistic stat = Statistic::exactly(r).restricted(tp.tail_start);
  RangePlan plan = plan_range(model, n, stat, std::numeric_limits<std::uint64_t>::max());
  Kahan s;
  for (std::uint64_t j = plan.start; j <= plan.cut; ++j) {
    double p = model.prob(j);
    if (p <= 0.0) break;
    s.add(term(p));
  }
  Interval total = iv_point(s.value());
  if (plan.has_tail && model.kind() == WeightModel::Kind::ZetaPowerLaw) {
    auto unit_cap = [&](double pe) {
      double lg = r * std::log(nd) + (r - 1.0) * std::log(pe) - lgr;
      return lg > std::log(nd) ? nd : std::exp(lg);
    };
    total = iv_add(total, tail_sum_power_law(model, plan.cut + 1, term, unit_cap));
  }
  return total.mid();
}

MuBoundReport mu_bound_check(const WeightModel& model, std::uint64_t n, int r) {
  if (r < 1) throw ValidationError("mu bound check: r must be >= 1");
  if (n < std::max<std::uint64_t>(2 * static_cast<std::uint64_t>(r), 3)) {
    throw ValidationError("mu bound check: requires n >= max(2r, 3)");
  }
  TailProfile tp = tail_profile(model, n);
  MuBoundReport rep;
  if (tp.tail_mass <= 0.0) {
    rep.vacuous = true;
    rep.pass = true;
    return rep;
  }
  Statistic stat = Statistic::exactly(r).restricted(tp.tail_start);
  RangePlan plan = plan_range(model, n, stat, std::numeric_limits<std::uint64_t>::max());
  Kahan s;
  for (std::uint64_t j = plan.start; j <= plan.cut; ++j) {
    double p = model.prob(j);
    if (p <= 0.0) break;
    s.add(binom_pmf(n, p, static_cast<std::uint64_t>(r)));
  }
  Interval mu = iv_point(s.value());
  if (plan.has_tail && model.kind() == WeightModel::Kind::ZetaPowerLaw) {
    const double lc = detail::log_choose(n, static_cast<std::uint64_t>(r));
    auto unit_cap = [&](double pe) {
      double lg = lc + (r - 1.0) * std::log(pe);
      double nd2 = static_cast<double>(n);
      return lg > std::log(nd2) ? nd2 : std::exp(lg);
    };
    mu = iv_add(mu, tail_sum_power_law(
                        model, plan.cut + 1,
                        [&](double p) { return binom_pmf(n, p, static_cast<std::uint64_t>(r)); },
                        unit_cap));
  }
  rep.mu_restricted = mu.mid();
  rep.mu_hat = mu_hat_r(model, n, r);
  const double nd = static_cast<double>(n);
  rep.lower = std::exp(-nd * tp.top_prob * tp.top_prob - r * r / nd);
  rep.upper = std::exp(r * tp.top_prob);
  rep.ratio = rep.mu_restricted / rep.mu_hat;
  rep.pass = rep.ratio >= rep.lower - 1e-12 && rep.ratio <= rep.upper + 1e-12;
  return rep;
}

namespace detail {

double occupied_pairwise_max_cov(const WeightModel& model, std::uint64_t n,
                                 std::uint64_t first_index) {
  std::uint64_t J = model.finite_support().value_or(0);
  if (J == 0 || J > kPairwiseGuard) {
    throw ResourceError("pairwise scan requires an explicit model of at most 5000 boxes");
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t j = first_index; j + 1 <= J; ++j) {
    for (std::uint64_t t = j + 1; t <= J; ++t) {
      worst = std::max(worst, occupied_pair_cov(clamp_p(model.prob(j)), clamp_p(model.prob(t)),
                                                static_cast<double>(n)));
    }
  }
  return worst;
}

}  // namespace detail

}  // namespace occtp
