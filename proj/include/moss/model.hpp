// A fitted rule-set model detached from its candidate pool: the selected
// rules, their ridge weights, and the training statistics needed to predict
// on new data. Split feature indices refer to the training feature order;
// prediction maps them onto a new dataset by feature name.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moss/data.hpp"
#include "moss/pool.hpp"
#include "moss/rules.hpp"

namespace moss {

struct ModelArtifact {
  std::vector<DecisionRule> rules;  // aligned with weights
  Eigen::VectorXd weights;
  Eigen::VectorXd column_means;  // training mean of each rule's prediction column
  double intercept = 0.0;        // training target mean
  double gamma = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double epsilon = 0.0;
  std::string method;
  std::vector<std::string> feature_names;  // training feature order
};

ModelArtifact make_artifact(const Solution& sol, const CandidatePool& pool,
                            const PredictionMatrix& pm,
                            const std::vector<std::string>& feature_names,
                            const std::string& method);

// yhat(x) = intercept + sum_i w_i (f_i(x) - column_means[i]). Every training
// feature named by some split must be present in `data`; extra columns are
// ignored.
Eigen::VectorXd model_predict(const ModelArtifact& model, const Dataset& data);

}  // namespace moss
