// Dense bounded-variable primal simplex. Small by design: the master
// relaxations it serves have (cuts + 2) rows and (pool + cuts + 3) columns,
// so a full-tableau method with an exact verification pass at the end is both
// fast enough and easy to trust. The caller supplies a starting basis and a
// basic feasible point, which the master construction can always produce, so
// there is no phase-1.
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace moss {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// minimize c^T x  subject to  a x = rhs,  lo <= x <= up.
// Bounds may be infinite.
struct LpProblem {
  RowMajorMatrix a;
  Eigen::VectorXd rhs;
  Eigen::VectorXd c;
  Eigen::VectorXd lo;
  Eigen::VectorXd up;
};

enum class LpStatus { optimal, unbounded, iteration_limit, numerical_error };

struct LpOptions {
  double feas_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-10;
  int max_iterations = 50000;
  int stall_limit = 500;  // non-improving pivots before Bland's rule kicks in
};

struct LpResult {
  LpStatus status = LpStatus::numerical_error;
  double objective = 0.0;
  Eigen::VectorXd x;
  int iterations = 0;
};

// `basis` holds one variable index per row; `x0` must be basic feasible for
// it (nonbasic entries exactly on a bound). Free variables (both bounds
// infinite) must be part of the initial basis; they never leave it. On
// LpStatus::optimal the result has been re-verified against the original
// problem data with a fresh factorization, so primal and dual feasibility
// hold to the stated tolerances.
LpResult solve_lp(const LpProblem& p, std::vector<int> basis, Eigen::VectorXd x0,
                  const LpOptions& opt = {});

}  // namespace moss
