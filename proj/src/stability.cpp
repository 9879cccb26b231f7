#include "moss/stability.hpp"

#include <algorithm>
#include <cmath>

#include "moss/errors.hpp"

namespace moss {

StabilityMetric parse_stability_metric(const std::string& name) {
  if (name == "dsc") return StabilityMetric::dsc;
  if (name == "jaccard") return StabilityMetric::jaccard;
  if (name == "ochiai") return StabilityMetric::ochiai;
  if (name == "pog") return StabilityMetric::pog;
  throw Error(ErrorKind::validation, "unknown stability metric '" + name + "'");
}

const char* stability_metric_name(StabilityMetric metric) {
  switch (metric) {
    case StabilityMetric::dsc: return "dsc";
    case StabilityMetric::jaccard: return "jaccard";
    case StabilityMetric::ochiai: return "ochiai";
    case StabilityMetric::pog: return "pog";
  }
  return "unknown";
}

RuleSet rule_set_of(const std::vector<DecisionRule>& rules) {
  RuleSet set;
  set.reserve(rules.size());
  for (const DecisionRule& r : rules) set.push_back(canonicalize(r.splits));
  std::sort(set.begin(), set.end(), rule_identity_less);
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

RuleSet rule_set_of(const CandidatePool& pool, const std::vector<int>& support) {
  std::vector<DecisionRule> rules;
  rules.reserve(support.size());
  for (int i : support) {
    if (i < 0 || i >= pool.size())
      throw Error(ErrorKind::index_out_of_range, "support index outside the pool");
    rules.push_back(pool.rules[static_cast<std::size_t>(i)]);
  }
  return rule_set_of(rules);
}

namespace {

// Both sets are sorted under rule_identity_less, so a single merge pass
// counts the overlap.
int intersection_size(const RuleSet& a, const RuleSet& b) {
  int count = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (rule_identity_less(a[i], b[j])) {
      ++i;
    } else if (rule_identity_less(b[j], a[i])) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace

double pairwise_similarity(const RuleSet& a, const RuleSet& b, StabilityMetric metric) {
  if (a.empty() || b.empty())
    throw Error(ErrorKind::empty_rule_set, "similarity of an empty rule set is undefined");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double both = intersection_size(a, b);
  switch (metric) {
    case StabilityMetric::dsc: return 2.0 * both / (na + nb);
    case StabilityMetric::jaccard: return both / (na + nb - both);
    case StabilityMetric::ochiai: return both / std::sqrt(na * nb);
    case StabilityMetric::pog: return both / na;
  }
  throw Error(ErrorKind::validation, "unknown stability metric");
}

double empirical_stability(const std::vector<RuleSet>& sets, StabilityMetric metric) {
  const int t = static_cast<int>(sets.size());
  if (t < 2)
    throw Error(ErrorKind::too_few_sets, "need at least two rule sets, got " +
                                             std::to_string(t));
  double total = 0.0;
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      if (i != j)
        total += pairwise_similarity(sets[static_cast<std::size_t>(i)],
                                     sets[static_cast<std::size_t>(j)], metric);
  return total / (static_cast<double>(t) * (t - 1));
}

Eigen::MatrixXd pairwise_matrix(const std::vector<RuleSet>& sets, StabilityMetric metric) {
  const int t = static_cast<int>(sets.size());
  Eigen::MatrixXd out(t, t);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      out(i, j) = pairwise_similarity(sets[static_cast<std::size_t>(i)],
                                      sets[static_cast<std::size_t>(j)], metric);
  return out;
}

}  // namespace moss
