#include "moss/cd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "moss/errors.hpp"
#include "moss/objective.hpp"

namespace moss {

namespace {

void validate_cd_config(const CdConfig& cfg) {
  if (cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0)
    throw Error(ErrorKind::validation, "penalty weights must be >= 0");
  if (cfg.max_sweeps < 1) throw Error(ErrorKind::validation, "max_sweeps must be >= 1");
  if (cfg.tol <= 0.0) throw Error(ErrorKind::validation, "tol must be positive");
}

double effective_gamma(const CdConfig& cfg, const PredictionMatrix& pm) {
  if (cfg.gamma <= 0.0) return pm.gamma;
  if (cfg.gamma != pm.gamma)
    throw Error(ErrorKind::validation,
                "config gamma disagrees with the prediction matrix");
  return cfg.gamma;
}

// Keep/drop decision shared by cd_update and the sweep loop. `rho` is
// M_k^T r_k and `denom` is M_k^T M_k + 1/gamma. Dropping costs nothing;
// keeping at the closed-form optimum improves the smooth part by
// rho^2 / (2 denom) and pays the effective penalty, so keep only on a
// strict win. A zero optimum never counts as "kept", even when the
// effective penalty is negative.
double keep_or_drop(double rho, double denom, double penalty) {
  const double w = rho / denom;
  if (w == 0.0) return 0.0;
  return (0.5 * rho * rho / denom > penalty) ? w : 0.0;
}

Solution refit(const std::vector<int>& support, const CandidatePool& pool,
               const PredictionMatrix& pm, const Eigen::VectorXd& y) {
  const RidgeKernel kernel = h2(support, pm, y);
  const FittedWeights fw = fit_weights(kernel, pm);
  Solution sol;
  sol.support = support;
  sol.weights = fw.weights;
  sol.intercept = fw.intercept;
  sol.h1 = h1(support, pool);
  sol.h2 = kernel.value;
  sol.epsilon = 0.0;
  return sol;
}

}  // namespace

double cd_update(const Eigen::VectorXd& residual_k, const Eigen::VectorXd& column,
                 double pi_k, const CdConfig& cfg) {
  validate_cd_config(cfg);
  if (cfg.gamma <= 0.0)
    throw Error(ErrorKind::gamma_not_positive, "cd_update needs an explicit gamma");
  if (residual_k.size() != column.size())
    throw Error(ErrorKind::dimension_mismatch, "residual and column lengths differ");
  const double rho = column.dot(residual_k);
  const double denom = column.squaredNorm() + 1.0 / cfg.gamma;
  return keep_or_drop(rho, denom, cfg.lambda1 - pi_k * cfg.lambda2);
}

CdResult solve_cd(const CandidatePool& pool, const PredictionMatrix& pm,
                  const Eigen::VectorXd& y, const CdConfig& cfg) {
  validate_cd_config(cfg);
  const int m = pool.size();
  if (pm.size() != m)
    throw Error(ErrorKind::dimension_mismatch, "pool and prediction matrix disagree");
  if (y.size() != pm.m.rows())
    throw Error(ErrorKind::dimension_mismatch, "target length does not match matrix rows");
  const double gamma = effective_gamma(cfg, pm);

  Eigen::VectorXd col_sq(m);
  for (int j = 0; j < m; ++j) col_sq[j] = pm.m.col(j).squaredNorm();

  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd r = y;  // y - M w, maintained incrementally
  CdResult result;

  const auto objective_now = [&]() {
    double pen = 0.0;
    for (int j = 0; j < m; ++j)
      if (w[j] != 0.0)
        pen += cfg.lambda1 - pool.pi[static_cast<std::size_t>(j)] * cfg.lambda2;
    return 0.5 * r.squaredNorm() + 0.5 / gamma * w.squaredNorm() + pen;
  };

  bool converged = false;
  int sweep = 0;
  for (; sweep < cfg.max_sweeps && !converged; ++sweep) {
    bool support_changed = false;
    double max_delta = 0.0;
    for (int j = 0; j < m; ++j) {
      const double old = w[j];
      // M_j^T r_j with r_j = r + M_j old, without materializing r_j.
      const double rho = pm.m.col(j).dot(r) + col_sq[j] * old;
      const double denom = col_sq[j] + 1.0 / gamma;
      const double next = keep_or_drop(
          rho, denom, cfg.lambda1 - pool.pi[static_cast<std::size_t>(j)] * cfg.lambda2);
      if (next != old) {
        r -= (next - old) * pm.m.col(j);
        w[j] = next;
        max_delta = std::max(max_delta, std::abs(next - old));
        if ((old == 0.0) != (next == 0.0)) support_changed = true;
      }
      if (cfg.record_trace) result.trace.push_back(objective_now());
    }
#ifndef NDEBUG
    assert(((y - pm.m * w) - r).lpNorm<Eigen::Infinity>() <= 1e-8 &&
           "incremental residual drifted");
#endif
    if (!support_changed && max_delta < cfg.tol) converged = true;
  }

  std::vector<int> support;
  for (int j = 0; j < m; ++j)
    if (w[j] != 0.0) support.push_back(j);

  result.solution = refit(support, pool, pm, y);
  result.w = std::move(w);
  result.converged = converged;
  result.sweeps = sweep;
  return result;
}

TargetKResult fit_target_k(const CandidatePool& pool, const PredictionMatrix& pm,
                           const Eigen::VectorXd& y, double lambda2, int k_target,
                           const CdConfig& base) {
  if (k_target < 1) throw Error(ErrorKind::validation, "k_target must be >= 1");
  if (lambda2 < 0.0) throw Error(ErrorKind::validation, "lambda2 must be >= 0");
  const int m = pool.size();
  if (pm.size() != m)
    throw Error(ErrorKind::dimension_mismatch, "pool and prediction matrix disagree");
  const double gamma = effective_gamma(base, pm);

  CdConfig cfg = base;
  cfg.lambda2 = lambda2;
  cfg.record_trace = false;

  TargetKResult best;
  best.achieved_k = -1;
  const auto consider = [&](double lambda1, const CdResult& run) {
    const int size = static_cast<int>(run.solution.support.size());
    if (size > k_target) return false;
    const bool better =
        size > best.achieved_k ||
        (size == best.achieved_k && run.solution.h2 < best.solution.h2);
    if (better) {
      best.solution = run.solution;
      best.achieved_k = size;
      best.lambda1 = lambda1;
      best.converged = run.converged;
    }
    return size == k_target;
  };
  const auto run_at = [&](double lambda1) {
    cfg.lambda1 = lambda1;
    return consider(lambda1, solve_cd(pool, pm, y, cfg));
  };

  // No coordinate survives its first visit once lambda1 clears every
  // entry gain from the zero iterate, so this bound yields an empty support.
  double lambda1_max = 0.0;
  for (int j = 0; j < m; ++j) {
    const double rho = pm.m.col(j).dot(y);
    const double gain = 0.5 * rho * rho / (pm.m.col(j).squaredNorm() + 1.0 / gamma);
    lambda1_max = std::max(lambda1_max,
                           gain + pool.pi[static_cast<std::size_t>(j)] * lambda2);
  }
  lambda1_max = std::nextafter(lambda1_max, lambda1_max + 1.0);

  if (run_at(0.0)) return best;  // densest point already fits the budget
  double lo = 0.0, hi = lambda1_max;
  for (int step = 0; step < 60; ++step) {
    const double mid = 0.5 * (lo + hi);
    cfg.lambda1 = mid;
    const CdResult run = solve_cd(pool, pm, y, cfg);
    if (consider(mid, run)) return best;
    if (static_cast<int>(run.solution.support.size()) > k_target)
      lo = mid;
    else
      hi = mid;
  }
  // Support size is not guaranteed monotone in lambda1, so when bisection
  // lands short of the target, sweep a uniform grid and keep the best point.
  for (int g = 1; g < 200; ++g) {
    if (run_at(lambda1_max * g / 200.0)) return best;
  }
  if (best.achieved_k < 0) run_at(lambda1_max);  // empty support as last resort
  return best;
}

}  // namespace moss
