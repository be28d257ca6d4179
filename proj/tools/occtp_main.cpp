// Command-line front end: every subcommand reads/writes JSON (single results)
// or CSV (tables). Stochastic subcommands require an explicit --seed; there is
// deliberately no time-based default.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "occtp/errors.hpp"
#include "occtp/exactdist.hpp"
#include "occtp/experiments.hpp"
#include "occtp/json_io.hpp"
#include "occtp/lemmas.hpp"
#include "occtp/metrics.hpp"
#include "occtp/moments.hpp"
#include "occtp/occusim.hpp"
#include "occtp/tpoisson.hpp"

namespace {

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw occtp::ValidationError("cannot write output file: " + out_path);
  out << text << "\n";
}

void emit_json(const nlohmann::json& j, const std::string& out_path) {
  emit_text(j.dump(2), out_path);
}

occtp::Statistic build_stat(const std::string& spec, std::uint64_t restrict_from) {
  occtp::Statistic stat = occtp::statistic_from_spec(spec);
  if (restrict_from > 0) stat.restricted_from = restrict_from;
  return stat;
}

std::vector<std::uint64_t> parse_grid(const std::string& csv) {
  std::vector<std::uint64_t> grid;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      grid.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw occtp::ValidationError("grid: expected comma-separated integers, got \"" + item +
                                   "\"");
    }
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"occupancy statistics and their translated Poisson approximations"};
  app.require_subcommand(1);

  std::string model_path, stat_spec = "kn", out_path, method_str = "mc";
  std::string pmf_p_path, pmf_q_path, grid_csv;
  std::uint64_t n = 0, reps = 0, samples = 1000000, seed = 0, boxes = 0, restrict_from = 0;
  unsigned threads = 1;
  double mu = 0.0, var = 0.0, prune_eps = 0.0;
  std::uint32_t id_instances = 10000, ineq_instances = 10000;

  auto* c_moments = app.add_subcommand("moments", "mean/variance of an occupancy statistic");
  c_moments->add_option("--model", model_path, "weight model JSON file")->required();
  c_moments->add_option("--n", n, "number of balls (count)")->required();
  c_moments->add_option("--stat", stat_spec, "statistic: kn or knr:<r>");
  c_moments->add_option("--restrict-from", restrict_from,
                        "count boxes from this 1-based index on (0 = all)");
  std::string mode_str = "auto";
  c_moments->add_option("--mode", mode_str, "summation mode: exact, hybrid, or auto");
  c_moments->add_option("--out", out_path, "output path (default: stdout)");

  auto* c_exact = app.add_subcommand("exact-pmf", "law of a statistic by the conditioning DP");
  c_exact->add_option("--model", model_path, "weight model JSON file")->required();
  c_exact->add_option("--n", n, "number of balls (count)")->required();
  c_exact->add_option("--stat", stat_spec, "statistic: kn or knr:<r>");
  c_exact->add_option("--restrict-from", restrict_from,
                      "count boxes from this 1-based index on (0 = all)");
  c_exact->add_option("--boxes", boxes, "boxes resolved exactly (0 = full explicit support)");
  c_exact->add_option("--prune-eps", prune_eps, "per-state mass floor (probability, <= 1e-9)");
  c_exact->add_option("--out", out_path, "output path (default: stdout)");

  auto* c_tpfit = app.add_subcommand("tp-fit", "fit a translated Poisson to (mu, var)");
  c_tpfit->add_option("--mu", mu, "target mean (real)")->required();
  c_tpfit->add_option("--var", var, "target variance (real, >= 0)")->required();
  c_tpfit->add_option("--out", out_path, "output path (default: stdout)");

  auto* c_dist = app.add_subcommand("distance", "distances between two integer pmfs");
  c_dist->add_option("--p", pmf_p_path, "first pmf JSON file")->required();
  c_dist->add_option("--q", pmf_q_path, "second pmf JSON file")->required();
  c_dist->add_option("--out", out_path, "output path (default: stdout)");

  auto* c_sim = app.add_subcommand("simulate", "empirical law of a statistic by simulation");
  c_sim->add_option("--model", model_path, "weight model JSON file")->required();
  c_sim->add_option("--n", n, "number of balls (count)")->required();
  c_sim->add_option("--stat", stat_spec, "statistic: kn or knr:<r>");
  c_sim->add_option("--restrict-from", restrict_from,
                    "count boxes from this 1-based index on (0 = all)");
  c_sim->add_option("--reps", reps, "replicates (count)")->required();
  c_sim->add_option("--seed", seed, "random seed (64-bit, required)")->required();
  c_sim->add_option("--threads", threads, "worker threads (count)");
  c_sim->add_option("--out", out_path, "output path (default: stdout)");

  auto* c_dec = app.add_subcommand("decompose", "conditional decomposition estimates");
  c_dec->add_option("--model", model_path, "weight model JSON file")->required();
  c_dec->add_option("--n", n, "number of balls (count)")->required();
  c_dec->add_option("--stat", stat_spec, "statistic: kn or knr:<r>");
  c_dec->add_option("--restrict-from", restrict_from,
                    "count boxes from this 1-based index on (0 = tail cutoff)");
  c_dec->add_option("--reps", reps, "replicates (count, >= 1000)")->required();
  c_dec->add_option("--seed", seed, "random seed (64-bit, required)")->required();
  c_dec->add_option("--out", out_path, "output path (default: stdout)");

  auto* c_rates = app.add_subcommand("rates", "distance-vs-sigma rate table");
  c_rates->add_option("--model", model_path, "weight model JSON file")->required();
  c_rates->add_option("--stat", stat_spec, "statistic: kn or knr:<r>");
  c_rates->add_option("--grid", grid_csv, "comma-separated increasing ball counts")->required();
  c_rates->add_option("--method", method_str, "law evaluation: exact or mc");
  c_rates->add_option("--samples", samples, "Monte Carlo samples per grid point (count)");
  c_rates->add_option("--seed", seed, "random seed (64-bit, required)")->required();
  c_rates->add_option("--threads", threads, "worker threads (count)");
  c_rates->add_option("--out", out_path, "CSV output path (default: stdout)");

  auto* c_lem = app.add_subcommand("lemmas", "randomized verification of the moment lemmas");
  c_lem->add_option("--seed", seed, "random seed (64-bit, required)")->required();
  c_lem->add_option("--identity-instances", id_instances, "instances per identity (count)");
  c_lem->add_option("--inequality-instances", ineq_instances, "instances per inequality (count)");
  c_lem->add_option("--out", out_path, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_moments->parsed()) {
      occtp::WeightModel model = occtp::load_model_file(model_path);
      occtp::Statistic stat = build_stat(stat_spec, restrict_from);
      occtp::MomentSummary ms;
      if (mode_str == "exact") {
        ms = occtp::moments(model, n, stat, occtp::MomentMode::ExactPairwise);
      } else if (mode_str == "hybrid") {
        ms = occtp::moments(model, n, stat, occtp::MomentMode::HybridLargeScale);
      } else if (mode_str == "auto") {
        auto support = model.finite_support();
        ms = occtp::moments(model, n, stat,
                            support && *support <= 5000 ? occtp::MomentMode::ExactPairwise
                                                        : occtp::MomentMode::HybridLargeScale);
      } else {
        throw occtp::ValidationError("mode: expected exact, hybrid, or auto");
      }
      emit_json(occtp::moments_to_json(ms), out_path);
    } else if (c_exact->parsed()) {
      occtp::WeightModel model = occtp::load_model_file(model_path);
      occtp::Statistic stat = build_stat(stat_spec, restrict_from);
      std::uint64_t J = boxes;
      if (J == 0) {
        auto support = model.finite_support();
        if (!support) {
          throw occtp::ValidationError("exact-pmf: --boxes is required for power-law models");
        }
        J = *support;
      }
      occtp::Pmf law = occtp::exact_pmf(model, n, stat, occtp::DpConfig{J, prune_eps});
      emit_json(occtp::pmf_to_json(law), out_path);
    } else if (c_tpfit->parsed()) {
      emit_json(occtp::tp_to_json(occtp::fit_tp(mu, var)), out_path);
    } else if (c_dist->parsed()) {
      occtp::Pmf p = occtp::load_pmf_file(pmf_p_path);
      occtp::Pmf q = occtp::load_pmf_file(pmf_q_path);
      emit_json(occtp::distance_to_json(occtp::total_variation(p, q), occtp::local_distance(p, q)),
                out_path);
    } else if (c_sim->parsed()) {
      occtp::WeightModel model = occtp::load_model_file(model_path);
      occtp::Statistic stat = build_stat(stat_spec, restrict_from);
      occtp::Pmf law = occtp::simulate_statistic_pmf(model, n, stat, reps, seed, threads);
      emit_json(occtp::pmf_to_json(law), out_path);
    } else if (c_dec->parsed()) {
      occtp::WeightModel model = occtp::load_model_file(model_path);
      occtp::Statistic stat = build_stat(stat_spec, restrict_from);
      occtp::Decomposition dec = occtp::decomposition_estimate(model, n, stat, reps, seed);
      emit_json(occtp::decomposition_to_json(dec), out_path);
    } else if (c_rates->parsed()) {
      occtp::WeightModel model = occtp::load_model_file(model_path);
      occtp::Statistic stat = build_stat(stat_spec, restrict_from);
      occtp::RateMethod method;
      if (method_str == "exact") {
        method = occtp::RateMethod::Exact;
      } else if (method_str == "mc") {
        method = occtp::RateMethod::MonteCarlo;
      } else {
        throw occtp::ValidationError("method: expected exact or mc");
      }
      occtp::RateStudy study =
          occtp::rate_study(model, stat, parse_grid(grid_csv), method, samples, seed, threads);
      std::ostringstream csv;
      occtp::write_rate_csv(csv, study);
      emit_text(csv.str(), out_path);
      if (!out_path.empty()) {
        nlohmann::json slopes;
        if (study.tv_slope) {
          slopes["tv_slope"] = study.tv_slope->slope;
          slopes["tv_r_squared"] = study.tv_slope->r_squared;
        }
        if (study.loc_slope) {
          slopes["loc_slope"] = study.loc_slope->slope;
          slopes["loc_r_squared"] = study.loc_slope->r_squared;
        }
        std::cout << slopes.dump(2) << "\n";
      }
    } else if (c_lem->parsed()) {
      occtp::LemmaSuiteConfig cfg;
      cfg.seed = seed;
      cfg.identity_instances = id_instances;
      cfg.inequality_instances = ineq_instances;
      std::vector<occtp::LemmaReport> reports = occtp::run_lemma_suite(cfg);
      emit_json(occtp::lemma_reports_to_json(reports), out_path);
      if (!occtp::lemma_suite_passed(reports)) return 3;
    }
  } catch (const occtp::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 2;
  } catch (const occtp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
