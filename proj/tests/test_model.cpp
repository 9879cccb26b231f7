// Model artifacts: detaching a solution from its pool, predicting on new
// data by feature name, and agreement between artifact predictions and the
// in-sample fitted values.
#include <doctest.h>

#include <vector>

#include "helpers.hpp"
#include "moss/errors.hpp"
#include "moss/model.hpp"
#include "moss/objective.hpp"
#include "moss/solver.hpp"

using mosstest::error_kind;

namespace {

struct Fitted {
  moss::Dataset data;
  moss::CandidatePool pool;
  moss::PredictionMatrix pm;
  Eigen::VectorXd y;
  moss::Solution sol;
};

Fitted fit_small(std::uint64_t seed) {
  Fitted f;
  f.data = mosstest::synthetic_dataset(50, 3, seed);
  f.pool = mosstest::threshold_pool(f.data, 8, seed + 1);
  f.pm = moss::build_prediction_matrix(f.pool, f.data, 1e-2);
  f.y = moss::centered_target(f.data, f.pm);
  f.sol = moss::stability_select_topk(f.pool, f.pm, f.y, 3);
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("make_artifact copies the selected rules and training stats") {
  const auto f = fit_small(1);
  const auto model =
      moss::make_artifact(f.sol, f.pool, f.pm, f.data.feature_names, "exact");
  REQUIRE(model.rules.size() == f.sol.support.size());
  REQUIRE(model.weights.size() == f.sol.weights.size());
  for (std::size_t i = 0; i < model.rules.size(); ++i) {
    const int src = f.sol.support[i];
    CHECK(moss::same_rule(model.rules[i],
                          f.pool.rules[static_cast<std::size_t>(src)]));
    CHECK(model.column_means(static_cast<long>(i)) ==
          f.pm.column_means(src));
  }
  CHECK(model.intercept == f.pm.target_mean);
  CHECK(model.gamma == f.pm.gamma);
  CHECK(model.h1 == f.sol.h1);
  CHECK(model.h2 == f.sol.h2);
  CHECK(model.method == "exact");
  CHECK(model.feature_names == f.data.feature_names);
}

TEST_CASE("in-sample predictions match the centered-design fit exactly") {
  const auto f = fit_small(2);
  const auto model =
      moss::make_artifact(f.sol, f.pool, f.pm, f.data.feature_names, "exact");
  const auto yhat = moss::model_predict(model, f.data);
  // Reference: intercept + M_S w on the centered design.
  Eigen::VectorXd ref =
      Eigen::VectorXd::Constant(f.data.n(), f.pm.target_mean);
  for (std::size_t i = 0; i < f.sol.support.size(); ++i)
    ref += f.sol.weights(static_cast<long>(i)) *
           f.pm.m.col(f.sol.support[i]);
  CHECK((yhat - ref).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("prediction maps features by name, tolerating reordered columns") {
  const auto f = fit_small(3);
  const auto model =
      moss::make_artifact(f.sol, f.pool, f.pm, f.data.feature_names, "exact");
  const auto base = moss::model_predict(model, f.data);

  // Same rows with the feature columns reversed and one extra column.
  moss::Dataset shuffled;
  const int p = static_cast<int>(f.data.p());
  shuffled.features.resize(f.data.n(), p + 1);
  shuffled.feature_names.clear();
  for (int j = 0; j < p; ++j) {
    shuffled.features.col(j) = f.data.features.col(p - 1 - j);
    shuffled.feature_names.push_back(
        f.data.feature_names[static_cast<std::size_t>(p - 1 - j)]);
  }
  shuffled.features.col(p).setConstant(42.0);
  shuffled.feature_names.push_back("extra");
  shuffled.target = Eigen::VectorXd::Zero(f.data.n());
  const auto moved = moss::model_predict(model, shuffled);
  CHECK((moved - base).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a missing named feature is a validation error") {
  const auto f = fit_small(4);
  const auto model =
      moss::make_artifact(f.sol, f.pool, f.pm, f.data.feature_names, "exact");
  moss::Dataset missing = f.data;
  missing.feature_names[0] = "renamed";
  // Only fails when some selected rule actually uses the renamed feature;
  // make sure one does by renaming every column used by the model.
  for (auto& name : missing.feature_names) name = "gone_" + name;
  CHECK(error_kind([&] { moss::model_predict(model, missing); }) ==
        moss::ErrorKind::validation);
}

TEST_CASE("empty-support artifacts predict the intercept everywhere") {
  const auto f = fit_small(5);
  moss::Solution empty;
  empty.intercept = f.pm.target_mean;  // what any fitted empty support carries
  empty.h2 = 0.5 * f.y.squaredNorm();
  const auto model =
      moss::make_artifact(empty, f.pool, f.pm, f.data.feature_names, "cd");
  const auto yhat = moss::model_predict(model, f.data);
  CHECK((yhat.array() - f.pm.target_mean).abs().maxCoeff() == 0.0);
}

TEST_SUITE_END();
