#include "occtp/experiments.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>

#include "detail_math.hpp"
#include "occtp/errors.hpp"
#include "occtp/exactdist.hpp"
#include "occtp/metrics.hpp"
#include "occtp/moments.hpp"
#include "occtp/occusim.hpp"
#include "occtp/tpoisson.hpp"

namespace occtp {
namespace {

using detail::Kahan;

// certified plug-in bias bound for an empirical distance against a smooth
// reference with masses q_k: sum_k min(sqrt(q_k / N), q_k)
std::pair<double, double> plugin_bias(const Pmf& reference, std::uint64_t samples) {
  double total = 0.0, worst = 0.0;
  for (double q : reference.masses) {
    double b = std::min(std::sqrt(q / static_cast<double>(samples)), q);
    total += b;
    worst = std::max(worst, b);
  }
  return {total, worst};
}

MomentSummary auto_moments(const WeightModel& model, std::uint64_t n, const Statistic& stat) {
  if (auto support = model.finite_support(); support && *support <= 5000) {
    return moments(model, n, stat, MomentMode::ExactPairwise);
  }
  return moments(model, n, stat, MomentMode::HybridLargeScale);
}

}  // namespace

std::optional<SlopeFit> fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) return std::nullopt;
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw ValidationError("loglog fit: points must be positive");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double np = static_cast<double>(points.size());
  double mx = sx / np, my = sy / np;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    double dx = std::log(x) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ValidationError("loglog fit: all abscissae coincide");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = syy - fit.slope * sxy;
  fit.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  return fit;
}

RateStudy rate_study(const WeightModel& model, const Statistic& stat,
                     const std::vector<std::uint64_t>& n_grid, RateMethod method,
                     std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (n_grid.empty()) throw ValidationError("rate study: empty grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 3) throw ValidationError("rate study: every n must be >= 3");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw ValidationError("rate study: grid must be strictly increasing");
    }
  }
  if (method == RateMethod::MonteCarlo && samples < 100000) {
    throw ValidationError("rate study: Monte Carlo needs at least 1e5 samples per point");
  }

  // admissible floor for the exactly-r statistic, reported per row as a warning
  std::optional<std::uint64_t> premise_floor;
  if (stat.kind == Statistic::Kind::ExactlyR) {
    try {
      double r = static_cast<double>(stat.exact_count);
      double floor_d = std::max({static_cast<double>(min_admissible_n(model)), std::exp(r / 4.0),
                                 2.0 * r});
      premise_floor = static_cast<std::uint64_t>(std::ceil(floor_d));
    } catch (const ValidationError&) {
      // degenerate split: no admissible floor exists for this model
    }
  }

  RateStudy study;
  for (std::uint64_t n : n_grid) {
    auto t0 = std::chrono::steady_clock::now();
    RateRow row;
    row.n = n;
    if (premise_floor && n < *premise_floor) {
      row.warnings.push_back("n below the admissible floor " +
                             std::to_string(*premise_floor));
    }

    MomentSummary ms = auto_moments(model, n, stat);
    row.mu = ms.mu;
    row.sigma2 = ms.var;
    TranslatedPoisson tp = fit_tp(ms.mu, ms.var);
    Pmf reference = tp_pmf_window(tp, 1e-12);

    Pmf law;
    if (method == RateMethod::Exact) {
      auto support = model.finite_support();
      if (!support) {
        throw ResourceError("rate study: exact method requires an explicit model");
      }
      law = exact_pmf(model, n, stat, DpConfig{*support, 1e-18});
      row.method = "exact";
      row.samples = 0;
    } else {
      std::uint64_t point_seed = Rng::stream(seed, n).next_u64();
      law = simulate_statistic_pmf(model, n, stat, samples, point_seed, threads);
      row.method = "monte_carlo";
      row.samples = samples;
    }

    DistanceResult tv = total_variation(law, reference);
    DistanceResult loc = local_distance(law, reference);
    row.d_tv = tv.value;
    row.d_tv_unc = tv.uncertainty;
    row.d_loc = loc.value;
    row.d_loc_unc = loc.uncertainty;
    if (method == RateMethod::MonteCarlo) {
      auto [bias_total, bias_worst] = plugin_bias(reference, samples);
      row.d_tv_unc += 0.5 * bias_total;
      row.d_loc_unc += bias_worst;
    } else {
      row.d_tv_unc += 0.5 * law.tail_defect;
      row.d_loc_unc += law.tail_defect;
    }
    row.tv_inconclusive = row.d_tv_unc > 0.3 * row.d_tv;
    row.loc_inconclusive = row.d_loc_unc > 0.3 * row.d_loc;

    auto t1 = std::chrono::steady_clock::now();
    row.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    study.rows.push_back(std::move(row));
  }

  std::vector<std::pair<double, double>> tv_pts, loc_pts;
  for (const auto& row : study.rows) {
    double sigma = std::sqrt(std::max(row.sigma2, 0.0));
    if (!row.tv_inconclusive && sigma > 0.0 && row.d_tv > 0.0) {
      tv_pts.emplace_back(sigma, row.d_tv);
    }
    if (!row.loc_inconclusive && sigma > 0.0 && row.d_loc > 0.0) {
      loc_pts.emplace_back(sigma, row.d_loc);
    }
  }
  study.tv_slope = fit_loglog_slope(tv_pts);
  study.loc_slope = fit_loglog_slope(loc_pts);
  return study;
}

LeCamReport lecam_report(const WeightModel& model, std::uint64_t n) {
  if (n < 3) throw ValidationError("le cam report: n must be >= 3");
  TailProfile tp = tail_profile(model, n);
  LeCamReport rep;
  rep.tail_start = tp.tail_start;
  rep.tail_mass = tp.tail_mass;
  const double nd = static_cast<double>(n);
  rep.n_cubed_inverse = 1.0 / (nd * nd * nd);

  Statistic restricted = Statistic::occupied_boxes().restricted(tp.tail_start);
  if (auto support = model.finite_support();
      support && *support <= 5000 && tp.tail_mass > 0.0) {
    Pmf exact = exact_pmf(model, n, restricted, DpConfig{*support, 1e-18});
    Pmf poissonized = poissonized_pmf(model, n, restricted, *support);
    DistanceResult tv = total_variation(exact, poissonized);
    rep.d_tv = tv.value;
    rep.d_tv_unc = tv.uncertainty;
    rep.bound_holds = tv.value <= tp.tail_mass + tv.uncertainty + 1e-12;
  } else if (tp.tail_mass <= 0.0) {
    rep.d_tv = 0.0;
    rep.d_tv_unc = 0.0;
    rep.bound_holds = true;
  }

  if (tp.tail_start >= 2) {
    std::uint64_t k = tp.tail_start - 1;
    if (k <= 25) {
      rep.low_boxes_prob = low_boxes_all_occupied(model, n, static_cast<std::uint32_t>(k));
    } else {
      // past the inclusion-exclusion guard: the union bound still gives an
      // honest lower bound on the all-occupied probability
      double miss = 0.0;
      for (std::uint64_t j = 1; j <= k; ++j) {
        miss += detail::pow_one_minus(model.prob(j), nd);
      }
      rep.low_boxes_prob = std::max(0.0, 1.0 - miss);
    }
  } else {
    rep.low_boxes_prob = 1.0;  // no low boxes at all
  }
  rep.low_boxes_ok = rep.low_boxes_prob >= 1.0 - rep.n_cubed_inverse;
  return rep;
}

void write_rate_csv(std::ostream& os, const RateStudy& study) {
  os << "n,mu,sigma2,d_tv,d_tv_unc,d_loc,d_loc_unc,method,samples,wall_time_ms\n";
  os << std::setprecision(17);
  for (const auto& row : study.rows) {
    os << row.n << ',' << row.mu << ',' << row.sigma2 << ',' << row.d_tv << ',' << row.d_tv_unc
       << ',' << row.d_loc << ',' << row.d_loc_unc << ',' << row.method << ',' << row.samples
       << ',' << row.wall_time_ms << '\n';
  }
}

}  // namespace occtp
