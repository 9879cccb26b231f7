// JSON and CSV persistence for every artifact the CLI reads or writes.
// Doubles pass through the serializer's shortest round-trip rendering, so a
// written value parses back bit-identical.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "moss/evaluation.hpp"
#include "moss/model.hpp"
#include "moss/pool.hpp"
#include "moss/stability.hpp"

namespace moss {

// {"splits":[{"feature":int,"op":"le"|"gt","threshold":real}],
//  "mu_in":real,"mu_out":real}
nlohmann::json rule_to_json(const DecisionRule& rule);
DecisionRule rule_from_json(const nlohmann::json& j);

// {"rules":[...],"pi":[...],"meta":{"trees","max_depth","quantiles","seed"}}
nlohmann::json pool_to_json(const CandidatePool& pool);
CandidatePool pool_from_json(const nlohmann::json& j);

// {"points":[{"epsilon","h1","h2","support","weights","intercept"}],
//  "cuts_generated","iterations_per_eps","pool_fingerprint"}
nlohmann::json frontier_to_json(const ParetoFrontier& frontier);

// Lines of "epsilon,h1,h2,support_size" under a header row.
std::string frontier_to_csv(const ParetoFrontier& frontier);

nlohmann::json model_to_json(const ModelArtifact& model);
ModelArtifact model_from_json(const nlohmann::json& j);

// A rule-identity set: an array of split arrays (no mu values).
nlohmann::json rule_set_to_json(const RuleSet& set);
RuleSet rule_set_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const ExperimentReport& report);
// One row per method: gamma,k,folds,method,mean_r2,se_r2,stability,seconds.
std::string report_to_csv(const ExperimentReport& report);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace moss
