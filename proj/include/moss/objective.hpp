// The two objectives driving selection. h1 is the in-sample stability proxy
// (sum of selection proportions over the support). h2 is the optimal value of
// the support-restricted ridge problem
//   min_w 1/2 ||y - M_S w||^2 + 1/(2 gamma) ||w||^2,
// evaluated without forming the n x n system: with B = I/gamma + M_S^T M_S
// and c = M_S^T y, the optimum equals 1/2 (y^T y - c^T B^{-1} c), the same
// value as 1/2 y^T (I + gamma M_S M_S^T)^{-1} y by the matrix inversion
// lemma. B is k x k for a support of size k, so each evaluation costs one
// small Cholesky.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "moss/pool.hpp"

namespace moss {

// Factorization byproducts of one h2 evaluation, reused by the gradient and
// by weight recovery.
struct RidgeKernel {
  std::vector<int> support;      // ascending pool indices
  Eigen::LLT<Eigen::MatrixXd> chol;  // Cholesky of B = I/gamma + M_S^T M_S
  Eigen::VectorXd c;             // M_S^T y
  Eigen::VectorXd residual;      // y - M_S B^{-1} c  (= A^{-1} y)
  double value = 0.0;            // h2 at this support
};

double h1(const std::vector<int>& support, const CandidatePool& pool);

// Evaluates h2 on a support. `y` must be the centered training target.
RidgeKernel h2(const std::vector<int>& support, const PredictionMatrix& pm,
               const Eigen::VectorXd& y);

// Gradient of the continuous relaxation of h2 at the kernel's support:
//   g_i = -(gamma/2) (M_i^T r)^2   with r the kernel residual.
// Every component is <= 0; returned full length (pool size).
Eigen::VectorXd grad_h2(const RidgeKernel& kernel, const PredictionMatrix& pm);

// Ridge weights on the kernel's support, w = B^{-1} c, plus the intercept
// (the training target mean).
struct FittedWeights {
  Eigen::VectorXd weights;  // aligned with kernel.support
  double intercept = 0.0;
};
FittedWeights fit_weights(const RidgeKernel& kernel, const PredictionMatrix& pm);

// Support must be sorted ascending, in range and duplicate free.
void check_support(const std::vector<int>& support, int pool_size);

}  // namespace moss
