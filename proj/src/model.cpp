#include "moss/model.hpp"

#include <algorithm>
#include <string>

#include "moss/errors.hpp"

namespace moss {

ModelArtifact make_artifact(const Solution& sol, const CandidatePool& pool,
                            const PredictionMatrix& pm,
                            const std::vector<std::string>& feature_names,
                            const std::string& method) {
  if (pm.size() != pool.size())
    throw Error(ErrorKind::dimension_mismatch, "pool and prediction matrix disagree");
  ModelArtifact model;
  const int size = static_cast<int>(sol.support.size());
  model.rules.reserve(static_cast<std::size_t>(size));
  model.column_means.resize(size);
  for (int j = 0; j < size; ++j) {
    const int i = sol.support[static_cast<std::size_t>(j)];
    if (i < 0 || i >= pool.size())
      throw Error(ErrorKind::index_out_of_range, "support index outside the pool");
    model.rules.push_back(pool.rules[static_cast<std::size_t>(i)]);
    model.column_means[j] = pm.column_means[i];
  }
  model.weights = sol.weights;
  model.intercept = sol.intercept;
  model.gamma = pm.gamma;
  model.h1 = sol.h1;
  model.h2 = sol.h2;
  model.epsilon = sol.epsilon;
  model.method = method;
  model.feature_names = feature_names;
  return model;
}

Eigen::VectorXd model_predict(const ModelArtifact& model, const Dataset& data) {
  if (model.weights.size() != static_cast<Eigen::Index>(model.rules.size()) ||
      model.column_means.size() != model.weights.size())
    throw Error(ErrorKind::dimension_mismatch, "model fields are misaligned");

  // Map training feature indices onto this dataset's columns by name. Only
  // features a split actually uses need to resolve.
  std::vector<int> col_of(model.feature_names.size(), -1);
  for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
    const auto it = std::find(data.feature_names.begin(), data.feature_names.end(),
                              model.feature_names[f]);
    if (it != data.feature_names.end())
      col_of[f] = static_cast<int>(it - data.feature_names.begin());
  }

  const Eigen::Index n = data.features.rows();
  Eigen::VectorXd yhat = Eigen::VectorXd::Constant(n, model.intercept);
  for (Eigen::Index row = 0; row < n; ++row) {
    for (std::size_t j = 0; j < model.rules.size(); ++j) {
      const DecisionRule& rule = model.rules[j];
      bool inside = true;
      for (const Split& s : rule.splits) {
        int col = s.feature;
        if (!model.feature_names.empty()) {
          if (s.feature < 0 || s.feature >= static_cast<int>(col_of.size()) ||
              col_of[static_cast<std::size_t>(s.feature)] < 0)
            throw Error(ErrorKind::validation,
                        "dataset lacks feature '" +
                            (s.feature >= 0 &&
                                     s.feature < static_cast<int>(model.feature_names.size())
                                 ? model.feature_names[static_cast<std::size_t>(s.feature)]
                                 : std::to_string(s.feature)) +
                            "' required by the model");
          col = col_of[static_cast<std::size_t>(s.feature)];
        }
        if (col >= data.features.cols())
          throw Error(ErrorKind::index_out_of_range, "split feature outside the dataset");
        if (!s.holds(data.features(row, col))) {
          inside = false;
          break;
        }
      }
      const double f = inside ? rule.mu_in : rule.mu_out;
      yhat[row] += model.weights[static_cast<Eigen::Index>(j)] *
                   (f - model.column_means[static_cast<Eigen::Index>(j)]);
    }
  }
  return yhat;
}

}  // namespace moss
