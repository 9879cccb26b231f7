// Prediction-matrix construction: centering, stored means, parameter
// validation, and the pool fingerprint used to tie artifacts together.
#include <doctest.h>

#include "helpers.hpp"
#include "moss/errors.hpp"
#include "moss/pool.hpp"

using mosstest::error_kind;
using mosstest::le;
using mosstest::rule;

TEST_SUITE_BEGIN("pool");

TEST_CASE("two-row column (3,1) centers to (1,-1)") {
  // Rule holds on row 0 only: mu_in = 3 there, mu_out = 1 on row 1.
  moss::Dataset data;
  data.features.resize(2, 1);
  data.features << 0.0, 5.0;
  data.target.resize(2);
  data.target << 1.0, 2.0;
  data.feature_names = {"x0"};

  auto pool = mosstest::pool_of({rule({le(0, 1.0)}, 3.0, 1.0)}, {0.8});
  const auto pm = moss::build_prediction_matrix(pool, data, 1.0);
  REQUIRE(pm.size() == 1);
  CHECK(pm.m(0, 0) == doctest::Approx(1.0));
  CHECK(pm.m(1, 0) == doctest::Approx(-1.0));
  CHECK(pm.column_means(0) == doctest::Approx(2.0));
  CHECK(pm.target_mean == doctest::Approx(1.5));
  CHECK(pm.gamma == 1.0);
}

TEST_CASE("a rule satisfied by every row centers to a zero column") {
  moss::Dataset data;
  data.features.resize(3, 1);
  data.features << 0.0, 1.0, 2.0;
  data.target.resize(3);
  data.target << 1.0, 2.0, 3.0;
  data.feature_names = {"x0"};

  auto pool = mosstest::pool_of({rule({le(0, 10.0)}, 4.0, -4.0)}, {1.0});
  const auto pm = moss::build_prediction_matrix(pool, data, 0.5);
  CHECK(pm.m.col(0).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(pm.column_means(0) == doctest::Approx(4.0));
}

TEST_CASE("every stored column is centered to within 1e-9") {
  const auto data = mosstest::synthetic_dataset(60, 4, 7);
  const auto pool = mosstest::threshold_pool(data, 12, 3);
  const auto pm = moss::build_prediction_matrix(pool, data, 1e-3);
  REQUIRE(pm.size() == 12);
  for (int j = 0; j < pm.size(); ++j)
    CHECK(std::abs(pm.m.col(j).mean()) <= 1e-9);
}

TEST_CASE("centered_target subtracts the stored target mean") {
  const auto data = mosstest::synthetic_dataset(40, 3, 9);
  const auto pool = mosstest::threshold_pool(data, 5, 4);
  const auto pm = moss::build_prediction_matrix(pool, data, 1.0);
  const auto y = moss::centered_target(data, pm);
  CHECK(std::abs(y.mean()) <= 1e-12);
  CHECK((y.array() + pm.target_mean - data.target.array()).abs().maxCoeff() <=
        1e-12);
}

TEST_CASE("gamma must be positive") {
  const auto data = mosstest::synthetic_dataset(10, 2, 1);
  const auto pool = mosstest::threshold_pool(data, 3, 2);
  CHECK(error_kind([&] { moss::build_prediction_matrix(pool, data, 0.0); }) ==
        moss::ErrorKind::gamma_not_positive);
  CHECK(error_kind([&] { moss::build_prediction_matrix(pool, data, -1.0); }) ==
        moss::ErrorKind::gamma_not_positive);
}

TEST_CASE("empty pools and feature-index overruns are rejected") {
  const auto data = mosstest::synthetic_dataset(10, 2, 1);
  moss::CandidatePool empty;
  CHECK(error_kind([&] { moss::build_prediction_matrix(empty, data, 1.0); }) ==
        moss::ErrorKind::empty_pool);

  // Rule referencing feature 5 of a 2-feature dataset.
  auto bad = mosstest::pool_of({rule({le(5, 1.0)}, 1.0, 0.0)}, {0.5});
  CHECK(error_kind([&] { moss::build_prediction_matrix(bad, data, 1.0); }) ==
        moss::ErrorKind::dimension_mismatch);
}

TEST_CASE("pool_fingerprint is stable and content-sensitive") {
  const auto data = mosstest::synthetic_dataset(30, 3, 11);
  auto pool = mosstest::threshold_pool(data, 6, 5);
  const auto fp1 = moss::pool_fingerprint(pool);
  CHECK(fp1 == moss::pool_fingerprint(pool));
  CHECK_FALSE(fp1.empty());

  auto perturbed = pool;
  perturbed.pi[0] = perturbed.pi[0] * 0.5;
  CHECK(moss::pool_fingerprint(perturbed) != fp1);

  auto fewer = pool;
  fewer.rules.pop_back();
  fewer.pi.pop_back();
  CHECK(moss::pool_fingerprint(fewer) != fp1);
}

TEST_SUITE_END();
