// Rule-set similarity. A rule's identity is its canonical split list alone;
// region means play no part, so two fits that carve out the same regions
// agree even when their leaf values differ. Empirical stability averages a
// pairwise metric over all ordered pairs of sets, which matches the
// unordered average for the symmetric metrics and keeps the asymmetric one
// (pog) well defined.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moss/pool.hpp"
#include "moss/rules.hpp"

namespace moss {

enum class StabilityMetric { dsc, jaccard, ochiai, pog };

StabilityMetric parse_stability_metric(const std::string& name);
const char* stability_metric_name(StabilityMetric metric);

// A set of rule identities: canonical split lists, sorted and deduplicated.
using RuleSet = std::vector<std::vector<Split>>;

RuleSet rule_set_of(const std::vector<DecisionRule>& rules);
// The identities of the pool rules a solution selected.
RuleSet rule_set_of(const CandidatePool& pool, const std::vector<int>& support);

// dsc = 2|a∩b|/(|a|+|b|), jaccard = |a∩b|/|a∪b|, ochiai = |a∩b|/sqrt(|a||b|),
// pog = |a∩b|/|a| (first argument is the reference set). Both sets must be
// non-empty.
double pairwise_similarity(const RuleSet& a, const RuleSet& b, StabilityMetric metric);

// Mean similarity over all ordered pairs i != j of the T >= 2 given sets.
double empirical_stability(const std::vector<RuleSet>& sets, StabilityMetric metric);

// Full T x T similarity matrix (diagonal included).
Eigen::MatrixXd pairwise_matrix(const std::vector<RuleSet>& sets, StabilityMetric metric);

}  // namespace moss
