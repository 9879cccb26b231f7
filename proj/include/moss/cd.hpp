// Approximate selection by coordinate descent on the penalized ridge
// objective
//   F(w) = 1/2 ||y - M w||^2 + 1/(2 gamma) ||w||^2
//          + sum_k (lambda1 - lambda2 pi_k) 1(w_k != 0).
// Each coordinate has a closed-form update; a coordinate stays in the model
// only when its quadratic improvement strictly beats its effective penalty,
// with ties resolved toward zero (sparser).
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "moss/pool.hpp"

namespace moss {

struct CdConfig {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  // Ridge parameter for cd_update. solve_cd and fit_target_k always use the
  // prediction matrix's gamma; leave this at 0 there, or set it to the same
  // value (a mismatch is rejected).
  double gamma = 0.0;
  int max_sweeps = 1000;
  double tol = 1e-8;
  // When set, F(w) is recorded after every coordinate visit (test hook; the
  // trace grows as sweeps * m).
  bool record_trace = false;
};

// One coordinate's closed-form update. `residual_k` excludes coordinate k,
// i.e. r_k = y - sum_{i != k} M_i w_i. Returns the new w_k, which is
//   w* = M_k^T r_k / (M_k^T M_k + 1/gamma)
// when keeping the coordinate improves F strictly, else 0. Requires
// cfg.gamma > 0.
double cd_update(const Eigen::VectorXd& residual_k, const Eigen::VectorXd& column,
                 double pi_k, const CdConfig& cfg);

struct CdResult {
  Solution solution;    // refit (debiased) ridge weights on the final support
  Eigen::VectorXd w;    // raw converged coordinates, full pool length
  bool converged = true;  // false when the sweep limit was hit first
  int sweeps = 0;
  std::vector<double> trace;  // F(w) per coordinate visit, if recorded
};

// Cyclic sweeps in ascending index order from w = 0 until a full sweep
// changes no support membership and no coordinate by tol or more. `y` must
// be the centered training target. Hitting max_sweeps returns the current
// iterate with converged = false rather than failing.
CdResult solve_cd(const CandidatePool& pool, const PredictionMatrix& pm,
                  const Eigen::VectorXd& y, const CdConfig& cfg);

struct TargetKResult {
  Solution solution;
  int achieved_k = 0;     // |support| actually reached (<= k_target)
  double lambda1 = 0.0;   // penalty level that produced it
  bool converged = true;
};

// Searches lambda1 for the largest support not exceeding k_target at fixed
// lambda2: bisection over [0, lambda1_max] first, then a linear grid scan
// when bisection lands short (support size need not be monotone in lambda1).
// Ties between candidates of equal size go to the lower h2.
TargetKResult fit_target_k(const CandidatePool& pool, const PredictionMatrix& pm,
                           const Eigen::VectorXd& y, double lambda2, int k_target,
                           const CdConfig& base = CdConfig{});

}  // namespace moss
