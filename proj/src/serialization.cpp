#include "moss/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "moss/errors.hpp"

namespace moss {

namespace {

using nlohmann::json;

json require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::validation, std::string("missing field '") + key + "'");
  return j.at(key);
}

json splits_to_json(const std::vector<Split>& splits) {
  json arr = json::array();
  for (const Split& s : splits)
    arr.push_back({{"feature", s.feature},
                   {"op", s.dir == SplitDir::le ? "le" : "gt"},
                   {"threshold", s.threshold}});
  return arr;
}

std::vector<Split> splits_from_json(const json& arr) {
  if (!arr.is_array())
    throw Error(ErrorKind::validation, "splits must be an array");
  std::vector<Split> splits;
  for (const json& sj : arr) {
    Split s;
    s.feature = require(sj, "feature").get<int>();
    s.threshold = require(sj, "threshold").get<double>();
    const std::string op = require(sj, "op").get<std::string>();
    if (op == "le")
      s.dir = SplitDir::le;
    else if (op == "gt")
      s.dir = SplitDir::gt;
    else
      throw Error(ErrorKind::validation, "split op must be 'le' or 'gt', got '" + op + "'");
    splits.push_back(s);
  }
  return canonicalize(splits);
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  if (!arr.is_array())
    throw Error(ErrorKind::validation, "expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const json& x : arr) v[i++] = x.get<double>();
  return v;
}

}  // namespace

json rule_to_json(const DecisionRule& rule) {
  return {{"splits", splits_to_json(rule.splits)},
          {"mu_in", rule.mu_in},
          {"mu_out", rule.mu_out}};
}

DecisionRule rule_from_json(const json& j) {
  DecisionRule rule;
  rule.splits = splits_from_json(require(j, "splits"));
  rule.mu_in = require(j, "mu_in").get<double>();
  rule.mu_out = require(j, "mu_out").get<double>();
  return rule;
}

json pool_to_json(const CandidatePool& pool) {
  json rules = json::array();
  for (const DecisionRule& r : pool.rules) rules.push_back(rule_to_json(r));
  return {{"rules", std::move(rules)},
          {"pi", pool.pi},
          {"meta",
           {{"trees", pool.meta.trees},
            {"max_depth", pool.meta.max_depth},
            {"quantiles", pool.meta.quantiles},
            {"seed", pool.meta.seed}}}};
}

CandidatePool pool_from_json(const json& j) {
  CandidatePool pool;
  for (const json& rj : require(j, "rules")) pool.rules.push_back(rule_from_json(rj));
  pool.pi = require(j, "pi").get<std::vector<double>>();
  if (pool.pi.size() != pool.rules.size())
    throw Error(ErrorKind::validation, "pi length does not match rule count");
  for (double p : pool.pi)
    if (!(p > 0.0 && p <= 1.0))
      throw Error(ErrorKind::validation, "pi values must lie in (0, 1]");
  if (j.contains("meta")) {
    const json& mj = j.at("meta");
    pool.meta.trees = mj.value("trees", 0);
    pool.meta.max_depth = mj.value("max_depth", 0);
    pool.meta.quantiles = mj.value("quantiles", 0);
    pool.meta.seed = mj.value("seed", std::uint64_t{0});
  }
  return pool;
}

json frontier_to_json(const ParetoFrontier& frontier) {
  json points = json::array();
  for (const ParetoPoint& pt : frontier.points) {
    points.push_back({{"epsilon", pt.epsilon},
                      {"h1", pt.solution.h1},
                      {"h2", pt.solution.h2},
                      {"support", pt.solution.support},
                      {"weights", vector_to_json(pt.solution.weights)},
                      {"intercept", pt.solution.intercept}});
  }
  return {{"points", std::move(points)},
          {"cuts_generated", frontier.cuts_generated},
          {"iterations_per_eps", frontier.iterations_per_eps},
          {"pool_fingerprint", frontier.pool_fingerprint}};
}

std::string frontier_to_csv(const ParetoFrontier& frontier) {
  std::ostringstream out;
  out << "epsilon,h1,h2,support_size\n";
  for (const ParetoPoint& pt : frontier.points) {
    out << json(pt.epsilon).dump() << ',' << json(pt.solution.h1).dump() << ','
        << json(pt.solution.h2).dump() << ',' << pt.solution.support.size() << '\n';
  }
  return out.str();
}

json model_to_json(const ModelArtifact& model) {
  json rules = json::array();
  for (const DecisionRule& r : model.rules) rules.push_back(rule_to_json(r));
  return {{"rules", std::move(rules)},
          {"weights", vector_to_json(model.weights)},
          {"column_means", vector_to_json(model.column_means)},
          {"intercept", model.intercept},
          {"gamma", model.gamma},
          {"h1", model.h1},
          {"h2", model.h2},
          {"epsilon", model.epsilon},
          {"method", model.method},
          {"feature_names", model.feature_names}};
}

ModelArtifact model_from_json(const json& j) {
  ModelArtifact model;
  for (const json& rj : require(j, "rules")) model.rules.push_back(rule_from_json(rj));
  model.weights = vector_from_json(require(j, "weights"));
  model.column_means = vector_from_json(require(j, "column_means"));
  model.intercept = require(j, "intercept").get<double>();
  model.gamma = require(j, "gamma").get<double>();
  model.h1 = j.value("h1", 0.0);
  model.h2 = j.value("h2", 0.0);
  model.epsilon = j.value("epsilon", 0.0);
  model.method = j.value("method", std::string{});
  model.feature_names = j.value("feature_names", std::vector<std::string>{});
  if (model.weights.size() != static_cast<Eigen::Index>(model.rules.size()) ||
      model.column_means.size() != model.weights.size())
    throw Error(ErrorKind::validation, "model arrays have inconsistent lengths");
  return model;
}

json rule_set_to_json(const RuleSet& set) {
  json arr = json::array();
  for (const std::vector<Split>& identity : set) arr.push_back(splits_to_json(identity));
  return arr;
}

RuleSet rule_set_from_json(const json& j) {
  if (!j.is_array())
    throw Error(ErrorKind::validation, "rule set must be an array of split lists");
  RuleSet set;
  for (const json& sj : j) set.push_back(splits_from_json(sj));
  std::sort(set.begin(), set.end(), rule_identity_less);
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

json report_to_json(const ExperimentReport& report) {
  json methods = json::array();
  for (const MethodReport& mr : report.methods) {
    json rule_sets = json::array();
    for (const RuleSet& set : mr.fold_rule_sets) rule_sets.push_back(rule_set_to_json(set));
    json solutions = json::array();
    for (const Solution& sol : mr.fold_solutions) {
      solutions.push_back({{"support", sol.support},
                           {"weights", vector_to_json(sol.weights)},
                           {"intercept", sol.intercept},
                           {"h1", sol.h1},
                           {"h2", sol.h2},
                           {"epsilon", sol.epsilon}});
    }
    methods.push_back({{"method", method_name(mr.method)},
                       {"mean_r2", mr.mean_r2},
                       {"se_r2", mr.se_r2},
                       {"stability", mr.stability},
                       {"fold_r2", mr.fold_r2},
                       {"fold_rule_sets", std::move(rule_sets)},
                       {"fold_solutions", std::move(solutions)},
                       {"seconds", mr.seconds}});
  }
  return {{"folds", report.folds},
          {"k", report.k},
          {"gamma", report.gamma},
          {"seed", report.seed},
          {"metric", stability_metric_name(report.metric)},
          {"methods", std::move(methods)}};
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "gamma,k,folds,method,mean_r2,se_r2,stability,seconds\n";
  for (const MethodReport& mr : report.methods) {
    out << json(report.gamma).dump() << ',' << report.k << ',' << report.folds << ','
        << method_name(mr.method) << ',' << json(mr.mean_r2).dump() << ','
        << json(mr.se_r2).dump() << ',' << json(mr.stability).dump() << ','
        << json(mr.seconds).dump() << '\n';
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::io, "read failed on '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write failed on '" + path + "'");
}

nlohmann::json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorKind::validation, "'" + path + "' is not valid JSON");
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace moss
