#include "occtp/occusim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "detail_math.hpp"
#include "occtp/errors.hpp"
#include "occtp/metrics.hpp"
#include "occtp/moments.hpp"

namespace occtp {
namespace {

using detail::Kahan;

constexpr std::uint64_t kTableCap = 1ull << 22;
constexpr std::uint64_t kGuideCap = 1ull << 18;
constexpr std::uint64_t kDeepestBox = 1ull << 50;

// retention kernel: probability that a box holding l stage-one balls ends up
// counted by the statistic after thinning with retention p0
double retention_kernel(const Statistic& stat, std::uint64_t l, double p0, double log1m_p0) {
  if (l == 0) return 0.0;
  if (stat.kind == Statistic::Kind::OccupiedBoxes) {
    return -std::expm1(static_cast<double>(l) * log1m_p0);
  }
  std::uint64_t r = static_cast<std::uint64_t>(stat.exact_count);
  if (l < r) return 0.0;
  return std::exp(detail::log_choose(l, r) + static_cast<double>(r) * std::log(p0) +
                  static_cast<double>(l - r) * log1m_p0);
}

// moment-based standard error of a Bessel-corrected sample variance
double variance_se(const std::vector<double>& xs, double mean, double s2) {
  const double n = static_cast<double>(xs.size());
  Kahan m4;
  for (double x : xs) {
    double d = x - mean;
    m4.add(d * d * d * d);
  }
  double v = (m4.value() / n - (n - 3.0) / (n - 1.0) * s2 * s2) / n;
  return std::sqrt(std::max(v, 0.0));
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // Bessel-corrected
};

MeanVar mean_var(const std::vector<double>& xs) {
  Kahan s;
  for (double x : xs) s.add(x);
  double mean = s.value() / static_cast<double>(xs.size());
  Kahan q;
  for (double x : xs) q.add((x - mean) * (x - mean));
  return {mean, q.value() / static_cast<double>(xs.size() - 1)};
}

// dense scratch counts with O(touched) reset
struct CountScratch {
  std::vector<std::uint32_t> dense;
  std::vector<std::uint64_t> touched;
  std::map<std::uint64_t, std::uint32_t> deep;  // indices past the table

  explicit CountScratch(std::uint64_t table_end) : dense(table_end + 1, 0) {}

  void bump(std::uint64_t j) {
    if (j < dense.size()) {
      if (dense[j]++ == 0) touched.push_back(j);
    } else {
      deep[j] += 1;
    }
  }
  void reset() {
    for (std::uint64_t j : touched) dense[j] = 0;
    touched.clear();
    deep.clear();
  }
};

std::uint64_t count_statistic(const CountScratch& s, const Statistic& stat) {
  std::uint64_t k = 0;
  for (std::uint64_t j : s.touched) {
    if (stat.counts(j, s.dense[j])) ++k;
  }
  for (const auto& [j, c] : s.deep) {
    if (stat.counts(j, c)) ++k;
  }
  return k;
}

CountMap to_count_map(const CountScratch& s) {
  CountMap out;
  for (std::uint64_t j : s.touched) out[j] = s.dense[j];
  for (const auto& [j, c] : s.deep) out[j] = c;
  return out;
}

}  // namespace

BoxSampler::BoxSampler(const WeightModel& model, std::uint64_t first_index, double renorm)
    : model_(&model), first_index_(first_index), renorm_(renorm) {
  if (first_index < 1) throw ValidationError("sampler: first index must be >= 1");
  if (!(renorm > 0.0)) throw DegenerateError("sampler: zero renormalization mass");
  base_ = model.cumulative(first_index - 1);
  std::uint64_t end = std::min<std::uint64_t>(model.cache_limit(), kTableCap);
  end = std::max(end, first_index);
  table_end_ = model.finite_support() ? std::min(end, *model.finite_support()) : end;
  cum_.resize(table_end_ - first_index + 1);
  for (std::uint64_t j = first_index; j <= table_end_; ++j) {
    cum_[j - first_index] = model.cumulative(j);
  }
  // guide cell i covers conditional targets in [i, i+1) / guide_cells_; a few
  // cells per table entry keeps the residual binary search near one probe
  guide_cells_ = std::clamp<std::uint64_t>(4 * cum_.size(), 16, kGuideCap);
  guide_.resize(guide_cells_ + 1);
  std::uint64_t pos = 0;
  for (std::uint64_t i = 0; i <= guide_cells_; ++i) {
    double target = base_ + renorm_ * static_cast<double>(i) / static_cast<double>(guide_cells_);
    while (pos < cum_.size() && cum_[pos] <= target) ++pos;
    guide_[i] = static_cast<std::uint32_t>(pos);
  }
}

std::uint64_t BoxSampler::invert_tail(double target) const {
  // smallest j past the table with cumulative mass above target, using the
  // midpoint of the certified tail enclosure; deterministic and off only by
  // the enclosure width in the far tail
  double rest = 1.0 - target;
  std::uint64_t lo = table_end_, hi = kDeepestBox;  // tail(lo+1) >= rest > tail(hi+1)
  auto tail_mid = [&](std::uint64_t j) { return model_->tail_mass_bounds(j).mid(); };
  if (tail_mid(hi + 1) >= rest) return hi;

  // closed-form guess from the leading tail term J^(1-a)/((a-1) zeta) = rest,
  // then an exponential gallop to a tight bracket around the true crossing
  double a = model_->exponent();
  double guess = std::pow(rest * (a - 1.0) * model_->zeta_constant(), 1.0 / (1.0 - a));
  std::uint64_t pivot = guess > static_cast<double>(kDeepestBox)
                            ? kDeepestBox
                            : static_cast<std::uint64_t>(std::max(guess, 1.0));
  pivot = std::clamp(pivot, lo + 1, hi);
  if (tail_mid(pivot + 1) >= rest) {
    std::uint64_t step = 1;
    while (pivot + step < hi && tail_mid(pivot + step + 1) >= rest) {
      pivot += step;
      step *= 2;
    }
    lo = pivot;
    hi = std::min(hi, pivot + step);
  } else {
    std::uint64_t step = 1;
    while (pivot > lo + step && tail_mid(pivot - step + 1) < rest) {
      pivot -= step;
      step *= 2;
    }
    hi = pivot;
    lo = pivot > lo + step ? pivot - step : lo;
  }
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (tail_mid(mid + 1) >= rest) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::uint64_t BoxSampler::draw(Rng& rng) const {
  double u = rng.next_double();
  double target = base_ + renorm_ * u;
  if (target >= cum_.back()) {
    if (model_->finite_support()) return table_end_;  // rounding edge
    return invert_tail(target);
  }
  std::size_t cell = static_cast<std::size_t>(u * static_cast<double>(guide_cells_));
  std::size_t lo = guide_[cell];
  std::size_t hi = guide_[cell + 1] + 1;
  hi = std::min(hi, cum_.size());
  // first position with cum > target
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (cum_[mid] <= target) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return first_index_ + lo;
}

AllocationSample sample_allocation(const WeightModel& model, std::uint64_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample: n must be >= 1");
  BoxSampler sampler(model, 1, 1.0);
  Rng rng = Rng::stream(seed, 0);
  CountScratch scratch(sampler.table_end());
  for (std::uint64_t b = 0; b < n; ++b) scratch.bump(sampler.draw(rng));
  AllocationSample out;
  out.counts = to_count_map(scratch);
  out.seed = seed;
  return out;
}

AllocationSample sample_two_stage(const WeightModel& model, std::uint64_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample: n must be >= 1");
  HalfSplit split = split_half(model);
  if (!(split.tail_mass > 0.0)) {
    throw DegenerateError("two-stage sample: the split tail carries no mass (P0 = 0)");
  }
  BoxSampler sampler(model, split.index, split.tail_mass);
  Rng rng = Rng::stream(seed, 0);
  CountScratch stage_one(sampler.table_end());
  CountScratch thinned(sampler.table_end());
  for (std::uint64_t b = 0; b < n; ++b) {
    std::uint64_t j = sampler.draw(rng);
    stage_one.bump(j);
    if (rng.next_bernoulli(split.tail_mass)) thinned.bump(j);
  }
  AllocationSample out;
  out.counts = to_count_map(thinned);
  out.stage_one = to_count_map(stage_one);
  out.seed = seed;
  return out;
}

std::pair<double, double> conditional_moments(const CountMap& stage_one, const WeightModel& model,
                                              std::uint64_t n, const Statistic& stat) {
  if (!stat.restricted_from.has_value()) {
    throw ValidationError("conditional moments: the statistic must carry restricted_from");
  }
  (void)n;
  HalfSplit split = split_half(model);
  const double p0 = split.tail_mass;
  if (!(p0 > 0.0)) throw DegenerateError("conditional moments: P0 = 0");
  const double log1m = std::log1p(-p0);
  Kahan mu, s2;
  for (const auto& [j, l] : stage_one) {
    if (j < *stat.restricted_from || l == 0) continue;
    double z = retention_kernel(stat, l, p0, log1m);
    mu.add(z);
    s2.add(z * (1.0 - z));
  }
  return {mu.value(), s2.value()};
}

Pmf conditional_pmf_given_stage_one(const CountMap& stage_one, const WeightModel& model,
                                    const Statistic& stat) {
  if (!stat.restricted_from.has_value()) {
    throw ValidationError("conditional pmf: the statistic must carry restricted_from");
  }
  HalfSplit split = split_half(model);
  const double p0 = split.tail_mass;
  if (!(p0 > 0.0)) throw DegenerateError("conditional pmf: P0 = 0");
  const double log1m = std::log1p(-p0);
  std::vector<double> conv{1.0};
  for (const auto& [j, l] : stage_one) {
    if (j < *stat.restricted_from || l == 0) continue;
    double z = retention_kernel(stat, l, p0, log1m);
    if (z <= 0.0) continue;
    conv.push_back(0.0);
    for (std::size_t k = conv.size() - 1; k > 0; --k) {
      conv[k] = conv[k] * (1.0 - z) + conv[k - 1] * z;
    }
    conv[0] *= 1.0 - z;
  }
  Pmf out;
  out.offset = 0;
  out.masses = std::move(conv);
  return out;
}

Decomposition decomposition_estimate(const WeightModel& model, std::uint64_t n, Statistic stat,
                                     std::uint64_t reps, std::uint64_t seed) {
  if (reps < 1000) throw ValidationError("decomposition: needs at least 1000 replicates");
  HalfSplit split = split_half(model);
  if (!(split.tail_mass > 0.0)) throw DegenerateError("decomposition: P0 = 0");
  const double p0 = split.tail_mass;
  const double log1m = std::log1p(-p0);

  Decomposition dec;
  dec.reps = reps;

  TailProfile tp = tail_profile(model, n);
  std::uint64_t restrict_from = stat.restricted_from.value_or(tp.tail_start);
  if (restrict_from < split.index) {
    dec.warnings.push_back(
        "restriction raised to the split index; the two-stage construction only realizes boxes "
        "from there on");
    restrict_from = split.index;
  }
  stat.restricted_from = restrict_from;
  try {
    std::uint64_t n0 = min_admissible_n(model);
    if (n < n0) {
      dec.warnings.push_back("n below the admissible floor " + std::to_string(n0) +
                             "; the decomposition ratios are not guaranteed stable here");
    }
  } catch (const ValidationError&) {
    // degenerate admissibility is already reported through P0 above
  }

  // retention kernel table over all possible stage-one counts
  std::vector<double> z_of(n + 1);
  for (std::uint64_t l = 0; l <= n; ++l) z_of[l] = retention_kernel(stat, l, p0, log1m);

  BoxSampler sampler(model, split.index, p0);
  CountScratch stage_one(sampler.table_end());
  CountScratch thinned(sampler.table_end());

  std::vector<double> w_vals(reps), mu_vals(reps), s2_vals(reps);
  for (std::uint64_t i = 0; i < reps; ++i) {
    Rng rng = Rng::stream(seed, i);
    stage_one.reset();
    thinned.reset();
    for (std::uint64_t b = 0; b < n; ++b) {
      std::uint64_t j = sampler.draw(rng);
      stage_one.bump(j);
      if (rng.next_bernoulli(p0)) thinned.bump(j);
    }
    Kahan mu, s2;
    for (std::uint64_t j : stage_one.touched) {
      if (j < restrict_from) continue;
      double z = z_of[stage_one.dense[j]];
      mu.add(z);
      s2.add(z * (1.0 - z));
    }
    for (const auto& [j, l] : stage_one.deep) {
      if (j < restrict_from) continue;
      double z = retention_kernel(stat, l, p0, log1m);
      mu.add(z);
      s2.add(z * (1.0 - z));
    }
    w_vals[i] = static_cast<double>(count_statistic(thinned, stat));
    mu_vals[i] = mu.value();
    s2_vals[i] = s2.value();
  }

  MeanVar w = mean_var(w_vals);
  MeanVar mu = mean_var(mu_vals);
  MeanVar s2 = mean_var(s2_vals);
  const double sqrt_reps = std::sqrt(static_cast<double>(reps));

  dec.sigma2 = w.var;
  dec.tau2 = mu.var;
  dec.rho2 = s2.mean;
  dec.nu2 = s2.var;
  dec.se_sigma2 = variance_se(w_vals, w.mean, w.var);
  dec.se_tau2 = variance_se(mu_vals, mu.mean, mu.var);
  dec.se_rho2 = std::sqrt(s2.var) / sqrt_reps;
  dec.se_nu2 = variance_se(s2_vals, s2.mean, s2.var);

  if (!(dec.tau2 > 0.0)) {
    throw DegenerateError("decomposition: estimated tau^2 is zero, U is undefined");
  }
  double tau = std::sqrt(dec.tau2);
  dec.u_samples.resize(reps);
  for (std::uint64_t i = 0; i < reps; ++i) dec.u_samples[i] = (mu_vals[i] - mu.mean) / tau;
  return dec;
}

ConditionRatios condition_ratios(const Decomposition& dec) {
  if (!(dec.rho2 > 0.0)) throw DegenerateError("condition ratios: rho^2 estimate is zero");
  if (!(dec.sigma2 > 0.0)) throw DegenerateError("condition ratios: sigma^2 estimate is zero");
  ConditionRatios out;
  out.nu2_over_rho2 = dec.nu2 / dec.rho2;
  out.rho2_over_sigma2 = dec.rho2 / dec.sigma2;
  auto ratio_se = [](double x, double sx, double y, double sy) {
    double r = x / y;
    return std::abs(r) * std::sqrt((sx / x) * (sx / x) + (sy / y) * (sy / y));
  };
  if (dec.nu2 > 0.0) {
    out.se_nu2_over_rho2 = ratio_se(dec.nu2, dec.se_nu2, dec.rho2, dec.se_rho2);
  }
  out.se_rho2_over_sigma2 = ratio_se(dec.rho2, dec.se_rho2, dec.sigma2, dec.se_sigma2);
  return out;
}

Pmf simulate_statistic_pmf(const WeightModel& model, std::uint64_t n, const Statistic& stat,
                           std::uint64_t reps, std::uint64_t seed, unsigned threads) {
  if (n < 1) throw ValidationError("simulate: n must be >= 1");
  if (reps < 1) throw ValidationError("simulate: needs at least one replicate");
  BoxSampler sampler(model, 1, 1.0);
  unsigned workers = std::max(1u, threads);
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, std::max<std::uint64_t>(1, reps / 1024)));

  // integer histograms merge associatively, so the result cannot depend on
  // the thread partition
  std::vector<std::vector<std::uint64_t>> hists(workers,
                                                std::vector<std::uint64_t>(n + 1, 0));
  auto run = [&](unsigned w) {
    CountScratch scratch(sampler.table_end());
    for (std::uint64_t i = w; i < reps; i += workers) {
      Rng rng = Rng::stream(seed, i);
      scratch.reset();
      for (std::uint64_t b = 0; b < n; ++b) scratch.bump(sampler.draw(rng));
      hists[w][count_statistic(scratch, stat)] += 1;
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  std::map<std::int64_t, std::uint64_t> counts;
  for (std::uint64_t k = 0; k <= n; ++k) {
    std::uint64_t total = 0;
    for (unsigned w = 0; w < workers; ++w) total += hists[w][k];
    if (total > 0) counts[static_cast<std::int64_t>(k)] = total;
  }
  return empirical_pmf(counts);
}

}  // namespace occtp
