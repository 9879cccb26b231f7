#include "moss/lp.hpp"

#include <cmath>
#include <limits>

namespace moss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarStatus : char { basic, at_lo, at_up };

struct Simplex {
  const LpProblem& p;
  const LpOptions& opt;
  Eigen::Index rows, cols;

  std::vector<int> basis;
  std::vector<VarStatus> status;
  Eigen::VectorXd x;
  RowMajorMatrix tableau;   // B^{-1} a
  Eigen::RowVectorXd dcost; // reduced costs c - c_B^T B^{-1} a
  int iterations = 0;
  bool bland = false;
  int stall = 0;
  double last_obj = kInf;

  Simplex(const LpProblem& p_, std::vector<int> basis_, Eigen::VectorXd x0,
          const LpOptions& opt_)
      : p(p_), opt(opt_), rows(p_.a.rows()), cols(p_.a.cols()),
        basis(std::move(basis_)), status(p_.a.cols(), VarStatus::at_lo),
        x(std::move(x0)) {
    for (Eigen::Index j = 0; j < cols; ++j)
      status[j] = x[j] >= p.up[j] ? VarStatus::at_up : VarStatus::at_lo;
    for (int b : basis) status[b] = VarStatus::basic;
  }

  // Recomputes tableau, reduced costs and basic values from the original
  // data. Returns false if the basis matrix is numerically singular.
  bool refactor() {
    Eigen::MatrixXd bmat(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) bmat.col(i) = p.a.col(basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    // A singular basis surfaces as non-finite solve output.
    tableau = lu.solve(p.a);
    if (!tableau.allFinite()) return false;

    // Basic values consistent with the nonbasic point.
    Eigen::VectorXd residual = p.rhs;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (status[j] != VarStatus::basic && x[j] != 0.0)
        residual -= p.a.col(j) * x[j];
    Eigen::VectorXd xb = lu.solve(residual);
    if (!xb.allFinite()) return false;
    for (Eigen::Index i = 0; i < rows; ++i) x[basis[i]] = xb[i];

    Eigen::VectorXd cb(rows);
    for (Eigen::Index i = 0; i < rows; ++i) cb[i] = p.c[basis[i]];
    Eigen::VectorXd y = Eigen::PartialPivLU<Eigen::MatrixXd>(bmat.transpose()).solve(cb);
    dcost = p.c.transpose() - y.transpose() * p.a;
    return true;
  }

  double objective() const { return p.c.dot(x); }

  // Nonbasic variable violating optimality, or -1. Direction +1 when it
  // should increase off its lower bound, -1 when it should decrease.
  int price(int& direction) const {
    int enter = -1;
    double best = opt.dual_tol;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (status[j] == VarStatus::basic || p.lo[j] == p.up[j]) continue;
      double viol = 0.0;
      int dir = 0;
      if (status[j] == VarStatus::at_lo && dcost[j] < -opt.dual_tol) {
        viol = -dcost[j];
        dir = +1;
      } else if (status[j] == VarStatus::at_up && dcost[j] > opt.dual_tol) {
        viol = dcost[j];
        dir = -1;
      } else {
        continue;
      }
      if (bland) {
        direction = dir;
        return static_cast<int>(j);
      }
      if (viol > best) {
        best = viol;
        enter = static_cast<int>(j);
        direction = dir;
      }
    }
    return enter;
  }

  LpStatus iterate() {
    for (; iterations < opt.max_iterations; ++iterations) {
      int dir = 0;
      const int enter = price(dir);
      if (enter < 0) return LpStatus::optimal;

      // Ratio test: how far the entering variable can move before a basic
      // variable (or the entering variable itself) hits a bound.
      double theta = p.up[enter] - p.lo[enter];  // bound flip distance
      int leave_row = -1;
      bool leave_to_upper = false;
      double best_pivot = 0.0;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double alpha = dir * tableau(i, enter);
        const int bv = basis[i];
        double t;
        bool to_upper;
        if (alpha > opt.pivot_tol) {  // basic variable decreases
          if (p.lo[bv] == -kInf) continue;
          t = (x[bv] - p.lo[bv]) / alpha;
          to_upper = false;
        } else if (alpha < -opt.pivot_tol) {  // basic variable increases
          if (p.up[bv] == kInf) continue;
          t = (x[bv] - p.up[bv]) / alpha;
          to_upper = true;
        } else {
          continue;
        }
        if (t < 0.0) t = 0.0;  // drift guard
        bool take;
        if (leave_row < 0) {
          take = t < theta;  // must beat the bound flip strictly
        } else if (t < theta - 1e-12) {
          take = true;
        } else if (t <= theta + 1e-12) {
          // Tie between blocking rows: Bland's rule picks the smallest
          // variable index, otherwise favor the larger pivot magnitude.
          take = bland ? bv < basis[leave_row]
                       : std::abs(tableau(i, enter)) > best_pivot;
        } else {
          take = false;
        }
        if (take) {
          theta = std::min(theta, t);
          leave_row = static_cast<int>(i);
          leave_to_upper = to_upper;
          best_pivot = std::abs(tableau(i, enter));
        }
      }

      if (leave_row < 0 && theta == kInf) return LpStatus::unbounded;

      // Move the solution.
      x[enter] += dir * theta;
      if (theta != 0.0)
        for (Eigen::Index i = 0; i < rows; ++i)
          x[basis[i]] -= dir * theta * tableau(i, enter);

      if (leave_row < 0) {
        // Entering variable ran to its other bound; no basis change.
        status[enter] = status[enter] == VarStatus::at_lo ? VarStatus::at_up
                                                          : VarStatus::at_lo;
        x[enter] = status[enter] == VarStatus::at_lo ? p.lo[enter] : p.up[enter];
      } else {
        const int leaving = basis[leave_row];
        status[leaving] = leave_to_upper ? VarStatus::at_up : VarStatus::at_lo;
        x[leaving] = leave_to_upper ? p.up[leaving] : p.lo[leaving];
        status[enter] = VarStatus::basic;
        basis[leave_row] = enter;

        const double pivot = tableau(leave_row, enter);
        tableau.row(leave_row) /= pivot;
        for (Eigen::Index i = 0; i < rows; ++i) {
          if (i == leave_row) continue;
          const double factor = tableau(i, enter);
          if (factor != 0.0) {
            tableau.row(i) -= factor * tableau.row(leave_row);
            tableau(i, enter) = 0.0;
          }
        }
        dcost -= dcost[enter] * tableau.row(leave_row);
        dcost[enter] = 0.0;
        tableau(leave_row, enter) = 1.0;
      }

      const double obj = objective();
      if (obj < last_obj - 1e-13 * (1.0 + std::abs(last_obj))) {
        stall = 0;
        last_obj = obj;
      } else if (++stall > opt.stall_limit) {
        bland = true;  // anti-cycling fallback
      }
    }
    return LpStatus::iteration_limit;
  }

  // Certificate check against the original data. True when the current basis
  // is primal and dual feasible to tolerance (x is refreshed in place).
  bool verify() {
    Eigen::MatrixXd bmat(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) bmat.col(i) = p.a.col(basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    Eigen::VectorXd residual = p.rhs;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (status[j] != VarStatus::basic && x[j] != 0.0)
        residual -= p.a.col(j) * x[j];
    Eigen::VectorXd xb = lu.solve(residual);
    if (!xb.allFinite()) return false;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const int bv = basis[i];
      if (xb[i] < p.lo[bv] - opt.feas_tol || xb[i] > p.up[bv] + opt.feas_tol)
        return false;
    }
    Eigen::VectorXd cb(rows);
    for (Eigen::Index i = 0; i < rows; ++i) cb[i] = p.c[basis[i]];
    Eigen::VectorXd y = Eigen::PartialPivLU<Eigen::MatrixXd>(bmat.transpose()).solve(cb);
    Eigen::RowVectorXd d = p.c.transpose() - y.transpose() * p.a;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (status[j] == VarStatus::basic || p.lo[j] == p.up[j]) continue;
      if (status[j] == VarStatus::at_lo && d[j] < -opt.dual_tol) return false;
      if (status[j] == VarStatus::at_up && d[j] > opt.dual_tol) return false;
    }
    for (Eigen::Index i = 0; i < rows; ++i) x[basis[i]] = xb[i];
    dcost = d;
    return true;
  }
};

}  // namespace

LpResult solve_lp(const LpProblem& p, std::vector<int> basis, Eigen::VectorXd x0,
                  const LpOptions& opt) {
  Simplex s(p, std::move(basis), std::move(x0), opt);
  LpResult result;
  if (!s.refactor()) {
    result.status = LpStatus::numerical_error;
    return result;
  }

  for (int restart = 0; restart < 4; ++restart) {
    const LpStatus st = s.iterate();
    if (st != LpStatus::optimal) {
      result.status = st;
      result.iterations = s.iterations;
      return result;
    }
    if (s.verify()) {
      result.status = LpStatus::optimal;
      result.objective = s.objective();
      result.x = s.x;
      result.iterations = s.iterations;
      return result;
    }
    // Tableau drift: rebuild from scratch and keep iterating.
    if (!s.refactor()) break;
    s.bland = true;
  }
  result.status = LpStatus::numerical_error;
  result.iterations = s.iterations;
  return result;
}

}  // namespace moss
