#include "moss/objective.hpp"

#include <string>

#include "moss/errors.hpp"

namespace moss {

void check_support(const std::vector<int>& support, int pool_size) {
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= pool_size)
      throw Error(ErrorKind::index_out_of_range,
                  "support index " + std::to_string(support[i]) +
                      " outside pool of size " + std::to_string(pool_size));
    if (i > 0 && support[i] <= support[i - 1])
      throw Error(ErrorKind::validation, "support must be strictly ascending");
  }
}

double h1(const std::vector<int>& support, const CandidatePool& pool) {
  check_support(support, pool.size());
  // Summed in ascending pool order so that equal index multisets always
  // produce bitwise identical totals (the pool is sorted by pi descending,
  // matching the window sums used to build the epsilon sequence).
  double total = 0.0;
  for (int idx : support) total += pool.pi[idx];
  return total;
}

RidgeKernel h2(const std::vector<int>& support, const PredictionMatrix& pm,
               const Eigen::VectorXd& y) {
  check_support(support, pm.size());
  if (y.size() != pm.n())
    throw Error(ErrorKind::dimension_mismatch,
                "target length does not match prediction matrix rows");

  RidgeKernel kernel;
  kernel.support = support;
  const int k = static_cast<int>(support.size());
  const double yty = y.squaredNorm();

  if (k == 0) {
    kernel.residual = y;
    kernel.value = 0.5 * yty;
    return kernel;
  }

  Eigen::MatrixXd msub(pm.n(), k);
  for (int j = 0; j < k; ++j) msub.col(j) = pm.m.col(support[j]);

  Eigen::MatrixXd b = msub.transpose() * msub;
  b.diagonal().array() += 1.0 / pm.gamma;
  kernel.c = msub.transpose() * y;

  kernel.chol.compute(b);
  if (kernel.chol.info() != Eigen::Success) {
    // B is positive definite in exact arithmetic; one diagonal jitter retry
    // covers pathological rounding before giving up.
    b.diagonal().array() += 1e-10 * b.trace() / k;
    kernel.chol.compute(b);
    if (kernel.chol.info() != Eigen::Success)
      throw Error(ErrorKind::cholesky_failure,
                  "ridge system not positive definite (support size " +
                      std::to_string(k) + ")");
  }

  const Eigen::VectorXd binv_c = kernel.chol.solve(kernel.c);
  kernel.residual = y - msub * binv_c;
  kernel.value = 0.5 * (yty - kernel.c.dot(binv_c));
  return kernel;
}

Eigen::VectorXd grad_h2(const RidgeKernel& kernel, const PredictionMatrix& pm) {
  const Eigen::VectorXd proj = pm.m.transpose() * kernel.residual;
  return (-(pm.gamma / 2.0) * proj.array().square()).matrix();
}

FittedWeights fit_weights(const RidgeKernel& kernel, const PredictionMatrix& pm) {
  FittedWeights fw;
  fw.intercept = pm.target_mean;
  if (kernel.support.empty()) {
    fw.weights.resize(0);
    return fw;
  }
  fw.weights = kernel.chol.solve(kernel.c);
  return fw;
}

}  // namespace moss
