// Cross-validated comparison harness. Each fold regenerates its own rule
// pool, prediction matrix, and epsilon ladder from the training rows alone,
// fits the requested selectors, and scores them on the held-out rows.
// Stability is the cross-fold empirical similarity of the selected rule
// identities.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moss/data.hpp"
#include "moss/forest.hpp"
#include "moss/solver.hpp"
#include "moss/stability.hpp"

namespace moss {

// Selection strategies compared by the harness. moss_h and moss_m bound h1
// by the 3rd and 40th ladder values (clamped); moss_l is the coordinate
// descent heuristic driven to the same size budget; topk is the
// proportion-ranking baseline.
enum class Method { topk, moss_h, moss_m, moss_l };

Method parse_method(const std::string& name);
const char* method_name(Method method);

struct ExperimentConfig {
  int folds = 10;
  int k = 15;
  double gamma = 1e-3;
  std::vector<Method> methods = {Method::topk, Method::moss_h, Method::moss_m,
                                 Method::moss_l};
  ForestConfig forest;
  // Stability weight handed to moss_l's penalty (its accuracy/sparsity
  // weight is searched internally to hit k).
  double lambda2 = 0.0;
  StabilityMetric metric = StabilityMetric::dsc;
  std::uint64_t seed = 0;
  SolverOptions solver;
  // Sensitivity mode: cartesian sweep over these; empty means "use the
  // scalar field above".
  std::vector<double> gamma_grid;
  std::vector<int> k_grid;
};

struct MethodReport {
  Method method = Method::topk;
  double mean_r2 = 0.0;
  double se_r2 = 0.0;  // sample sd across folds / sqrt(folds)
  double stability = 0.0;
  std::vector<double> fold_r2;
  std::vector<RuleSet> fold_rule_sets;
  std::vector<Solution> fold_solutions;
  double seconds = 0.0;  // selector time summed over folds
};

struct ExperimentReport {
  int folds = 0;
  int k = 0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  StabilityMetric metric = StabilityMetric::dsc;
  std::vector<MethodReport> methods;
};

// 1 - SSE/SST with SST around the test-split mean. y_true must not be
// constant.
double r_squared(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

// Deterministic fold assignment: rows are shuffled once from the seed, then
// cut into `folds` contiguous blocks (sizes differ by at most one). Returned
// test-row lists are sorted ascending.
std::vector<std::vector<int>> cv_folds(int n, int folds, std::uint64_t seed);

ExperimentReport run_cv(const Dataset& data, const ExperimentConfig& cfg);

// One run_cv per (gamma, k) grid point, same seed throughout. An empty grid
// falls back to the scalar field; at least one grid must be present.
std::vector<ExperimentReport> run_sensitivity(const Dataset& data,
                                              const ExperimentConfig& cfg);

}  // namespace moss
