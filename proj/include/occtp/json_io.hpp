#pragma once

#include <string>

#include "json.hpp"
#include "occtp/experiments.hpp"
#include "occtp/lemmas.hpp"
#include "occtp/metrics.hpp"
#include "occtp/moments.hpp"
#include "occtp/occusim.hpp"
#include "occtp/pmf.hpp"
#include "occtp/statistic.hpp"
#include "occtp/tpoisson.hpp"
#include "occtp/weights.hpp"

namespace occtp {

// {"kind":"explicit","probs":[...]} or {"kind":"zeta","exponent":a}
WeightModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const WeightModel& model);
WeightModel load_model_file(const std::string& path);

// {"offset":..,"masses":[..],"tail_defect":..}
Pmf pmf_from_json(const nlohmann::json& j);
nlohmann::json pmf_to_json(const Pmf& pmf);
Pmf load_pmf_file(const std::string& path);

// "kn" or "knr:<r>"
Statistic statistic_from_spec(const std::string& spec);

nlohmann::json tp_to_json(const TranslatedPoisson& tp);
nlohmann::json moments_to_json(const MomentSummary& ms);
nlohmann::json distance_to_json(const DistanceResult& tv, const DistanceResult& loc);
nlohmann::json decomposition_to_json(const Decomposition& dec);
nlohmann::json lemma_reports_to_json(const std::vector<LemmaReport>& reports);
nlohmann::json lecam_to_json(const LeCamReport& rep);

}  // namespace occtp
