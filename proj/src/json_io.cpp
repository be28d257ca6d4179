#include "occtp/json_io.hpp"

#include <fstream>

#include "occtp/errors.hpp"

namespace occtp {

namespace {

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace

WeightModel model_from_json(const nlohmann::json& j) {
  if (!j.contains("kind")) throw ValidationError("model JSON: missing field \"kind\"");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "explicit") {
    if (!j.contains("probs")) throw ValidationError("model JSON: missing field \"probs\"");
    return make_explicit(j.at("probs").get<std::vector<double>>());
  }
  if (kind == "zeta") {
    if (!j.contains("exponent")) throw ValidationError("model JSON: missing field \"exponent\"");
    return make_zeta(j.at("exponent").get<double>());
  }
  throw ValidationError("model JSON: unknown kind \"" + kind + "\"");
}

nlohmann::json model_to_json(const WeightModel& model) {
  nlohmann::json j;
  if (model.kind() == WeightModel::Kind::Explicit) {
    j["kind"] = "explicit";
    std::vector<double> probs(*model.finite_support());
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = model.prob(i + 1);
    j["probs"] = probs;
  } else {
    j["kind"] = "zeta";
    j["exponent"] = model.exponent();
  }
  return j;
}

WeightModel load_model_file(const std::string& path) { return model_from_json(parse_file(path)); }

Pmf pmf_from_json(const nlohmann::json& j) {
  for (const char* field : {"offset", "masses", "tail_defect"}) {
    if (!j.contains(field)) {
      throw ValidationError(std::string("pmf JSON: missing field \"") + field + "\"");
    }
  }
  Pmf p;
  p.offset = j.at("offset").get<std::int64_t>();
  p.masses = j.at("masses").get<std::vector<double>>();
  p.tail_defect = j.at("tail_defect").get<double>();
  p.validate();
  return p;
}

nlohmann::json pmf_to_json(const Pmf& pmf) {
  return nlohmann::json{
      {"offset", pmf.offset}, {"masses", pmf.masses}, {"tail_defect", pmf.tail_defect}};
}

Pmf load_pmf_file(const std::string& path) { return pmf_from_json(parse_file(path)); }

Statistic statistic_from_spec(const std::string& spec) {
  if (spec == "kn") return Statistic::occupied_boxes();
  if (spec.rfind("knr:", 0) == 0) {
    int r = 0;
    try {
      r = std::stoi(spec.substr(4));
    } catch (const std::exception&) {
      throw ValidationError("statistic spec: expected knr:<positive integer>, got \"" + spec +
                            "\"");
    }
    return Statistic::exactly(r);
  }
  throw ValidationError("statistic spec: expected \"kn\" or \"knr:<r>\", got \"" + spec + "\"");
}

nlohmann::json tp_to_json(const TranslatedPoisson& tp) {
  return nlohmann::json{{"shift", tp.shift}, {"rate", tp.rate}};
}

nlohmann::json moments_to_json(const MomentSummary& ms) {
  return nlohmann::json{
      {"mu", ms.mu},
      {"var", ms.var},
      {"truncation_error", ms.truncation_error},
      {"mode", ms.mode == MomentMode::ExactPairwise ? "ExactPairwise" : "HybridLargeScale"}};
}

nlohmann::json distance_to_json(const DistanceResult& tv, const DistanceResult& loc) {
  return nlohmann::json{{"tv", tv.value},
                        {"tv_uncertainty", tv.uncertainty},
                        {"loc", loc.value},
                        {"loc_uncertainty", loc.uncertainty}};
}

nlohmann::json decomposition_to_json(const Decomposition& dec) {
  return nlohmann::json{{"sigma2", dec.sigma2},
                        {"tau2", dec.tau2},
                        {"rho2", dec.rho2},
                        {"nu2", dec.nu2},
                        {"se_sigma2", dec.se_sigma2},
                        {"se_tau2", dec.se_tau2},
                        {"se_rho2", dec.se_rho2},
                        {"se_nu2", dec.se_nu2},
                        {"reps", dec.reps},
                        {"clamped", dec.clamped},
                        {"warnings", dec.warnings},
                        {"u_samples", dec.u_samples}};
}

nlohmann::json lemma_reports_to_json(const std::vector<LemmaReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& rep : reports) {
    arr.push_back(nlohmann::json{{"lemma_id", rep.lemma_id},
                                 {"instance", rep.instance},
                                 {"lhs", rep.lhs},
                                 {"rhs", rep.rhs},
                                 {"pass", rep.pass},
                                 {"vacuous", rep.vacuous},
                                 {"method", rep.method}});
  }
  return arr;
}

nlohmann::json lecam_to_json(const LeCamReport& rep) {
  nlohmann::json j{{"tail_start", rep.tail_start},
                   {"tail_mass", rep.tail_mass},
                   {"n_cubed_inverse", rep.n_cubed_inverse},
                   {"bound_holds", rep.bound_holds},
                   {"low_boxes_prob", rep.low_boxes_prob},
                   {"low_boxes_ok", rep.low_boxes_ok}};
  if (rep.d_tv) {
    j["d_tv"] = *rep.d_tv;
    j["d_tv_unc"] = *rep.d_tv_unc;
  }
  return j;
}

}  // namespace occtp
