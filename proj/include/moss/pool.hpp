// Candidate rule pools, the centered prediction matrix built from them, and
// the solution / frontier value types produced by the optimizers.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moss/data.hpp"
#include "moss/rules.hpp"

namespace moss {

// How a pool came to be; carried along so artifacts stay self-describing.
struct GenerationMeta {
  int trees = 0;
  int max_depth = 0;
  int quantiles = 0;
  std::uint64_t seed = 0;
};

// Rules sorted by selection proportion descending (ties broken by the
// lexicographic order of the canonical split lists). pi[i] in (0, 1] is the
// fraction of forest trees whose paths contain rule i.
struct CandidatePool {
  std::vector<DecisionRule> rules;
  std::vector<double> pi;
  GenerationMeta meta;

  int size() const { return static_cast<int>(rules.size()); }
};

// Centered design for the ridge subproblem. Column i holds the rule outputs
// f_i(X) minus their training mean; predictions later add the means back via
//   yhat(x) = target_mean + sum_i w_i * (f_i(x) - column_means[i]).
struct PredictionMatrix {
  Eigen::MatrixXd m;  // n x pool_size, columns centered on the training rows
  Eigen::VectorXd column_means;
  double target_mean = 0.0;
  double gamma = 0.0;  // ridge level, > 0

  Eigen::Index n() const { return m.rows(); }
  int size() const { return static_cast<int>(m.cols()); }
};

PredictionMatrix build_prediction_matrix(const CandidatePool& pool,
                                         const Dataset& data, double gamma);

// Centered training target paired with a PredictionMatrix.
inline Eigen::VectorXd centered_target(const Dataset& data, const PredictionMatrix& pm) {
  return data.target.array() - pm.target_mean;
}

// A selected-and-fitted rule set. `support` indexes into the pool it was
// solved against (ascending); weights align with support.
struct Solution {
  std::vector<int> support;
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double h1 = 0.0;       // sum of pool pi over the support
  double h2 = 0.0;       // optimal ridge objective on the support
  double epsilon = 0.0;  // stability bound this solution was solved under; 0 for heuristics
};

struct ParetoPoint {
  double epsilon = 0.0;
  Solution solution;
};

struct ParetoFrontier {
  std::vector<ParetoPoint> points;  // epsilon strictly decreasing
  std::string pool_fingerprint;
  long cuts_generated = 0;
  std::vector<int> iterations_per_eps;
};

// Stable 64-bit digest of the pool contents, hex encoded. Stored on frontiers
// so downstream artifacts can detect a pool mismatch.
std::string pool_fingerprint(const CandidatePool& pool);

}  // namespace moss
