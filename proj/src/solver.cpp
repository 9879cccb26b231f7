#include "moss/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "moss/errors.hpp"
#include "moss/log.hpp"

namespace moss {

EpsilonSequence epsilon_sequence(const std::vector<double>& pi, int k) {
  const int m = static_cast<int>(pi.size());
  if (m == 0) throw Error(ErrorKind::empty_pool, "empty proportion vector");
  if (k < 1) throw Error(ErrorKind::validation, "k must be >= 1");
  if (k > m)
    throw Error(ErrorKind::k_too_large,
                "k=" + std::to_string(k) + " exceeds pool size " + std::to_string(m));

  std::vector<double> sorted = pi;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  EpsilonSequence seq;
  for (int off = 0; off + k <= m; ++off) {
    double window = 0.0;
    for (int i = off; i < off + k; ++i) window += sorted[static_cast<std::size_t>(i)];
    if (seq.values.empty() || window < seq.values.back()) seq.values.push_back(window);
  }
  return seq;
}

namespace {

Solution finish_solution(const std::vector<int>& support, const CandidatePool& pool,
                         const PredictionMatrix& pm, const Eigen::VectorXd& y,
                         double epsilon) {
  const RidgeKernel kernel = h2(support, pm, y);
  const FittedWeights fw = fit_weights(kernel, pm);
  Solution sol;
  sol.support = support;
  sol.weights = fw.weights;
  sol.intercept = fw.intercept;
  sol.h1 = h1(support, pool);
  sol.h2 = kernel.value;
  sol.epsilon = epsilon;
  return sol;
}

}  // namespace

Solution stability_select_topk(const CandidatePool& pool, const PredictionMatrix& pm,
                               const Eigen::VectorXd& y, int k) {
  const int m = pool.size();
  if (k < 1) throw Error(ErrorKind::validation, "k must be >= 1");
  if (k > m)
    throw Error(ErrorKind::k_too_large,
                "k=" + std::to_string(k) + " exceeds pool size " + std::to_string(m));
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return pool.pi[static_cast<std::size_t>(a)] >
                                              pool.pi[static_cast<std::size_t>(b)]; });
  std::vector<int> support(order.begin(), order.begin() + k);
  std::sort(support.begin(), support.end());
  return finish_solution(support, pool, pm, y, 0.0);
}

Solution solve_fixed_epsilon(const CandidatePool& pool, const PredictionMatrix& pm,
                             const Eigen::VectorXd& y, int k, double epsilon,
                             CutStore& cuts, const std::vector<int>& warm,
                             SolveStats* stats, const SolverOptions& opt) {
  const int m = pool.size();
  if (pm.size() != m)
    throw Error(ErrorKind::dimension_mismatch, "pool and prediction matrix disagree");
  if (k < 1) throw Error(ErrorKind::validation, "k must be >= 1");
  if (k > m)
    throw Error(ErrorKind::k_too_large,
                "k=" + std::to_string(k) + " exceeds pool size " + std::to_string(m));
  Eigen::VectorXd pi = Eigen::Map<const Eigen::VectorXd>(pool.pi.data(), m);
  if (!check_feasible(pi, k, epsilon)) {
    const EpsilonSequence seq = epsilon_sequence(pool.pi, k);
    throw Error(ErrorKind::infeasible,
                "stability bound unattainable for this pool",
                {{"epsilon", epsilon}, {"epsilon_max", seq.max()}});
  }

  check_support(warm, m);
  if (static_cast<int>(warm.size()) > k)
    throw Error(ErrorKind::validation, "warm-start support larger than k");
  if (h1(warm, pool) < epsilon - kMasterFeasSlack)
    throw Error(ErrorKind::validation, "warm-start support infeasible for epsilon");

  std::vector<int> current = warm;
  RidgeKernel kernel = h2(current, pm, y);
  std::vector<int> best_support = current;
  double best_h2 = kernel.value;

  for (int outer = 0; outer < opt.max_outer; ++outer) {
    // Linearize h2 at the current point and add the cut.
    const Eigen::VectorXd g = grad_h2(kernel, pm);
    double offset = kernel.value;
    for (int i : current) offset -= g[i];
    cuts.cuts.push_back(Cut{g, offset, current});
    if (stats) {
      ++stats->cuts_added;
      ++stats->iterations;
    }

    MasterProblem mp;
    mp.cuts = &cuts;
    mp.pi = pi;
    mp.epsilon = epsilon;
    mp.k = k;
    mp.warm = best_support;
    const MasterResult master = solve_master(mp, opt.master);
    if (stats) {
      ++stats->masters;
      stats->nodes += master.nodes;
    }

    kernel = h2(master.support, pm, y);
    if (kernel.value < best_h2) {
      best_h2 = kernel.value;
      best_support = master.support;
    }

    // master.nu lower-bounds the true optimum; the incumbent is accepted
    // once the sandwich closes.
    const double delta = opt.delta_factor * (1.0 + std::abs(best_h2));
    if (best_h2 <= master.nu + delta) {
      if (log_enabled(LogLevel::debug))
        log_line(LogLevel::debug,
                 "fixed-eps " + std::to_string(epsilon) + ": converged after " +
                     std::to_string(outer + 1) + " cuts, h2=" + std::to_string(best_h2));
      return finish_solution(best_support, pool, pm, y, epsilon);
    }
    current = master.support;
  }
  throw Error(ErrorKind::iteration_limit,
              "cutting-plane loop exceeded " + std::to_string(opt.max_outer) +
                  " iterations",
              {{"epsilon", epsilon}});
}

ParetoFrontier compute_pareto(const CandidatePool& pool, const PredictionMatrix& pm,
                              const Eigen::VectorXd& y, int k,
                              const std::vector<double>& eps_values,
                              const ParetoOptions& opt) {
  if (eps_values.empty())
    throw Error(ErrorKind::validation, "need at least one epsilon value");
  for (std::size_t i = 1; i < eps_values.size(); ++i)
    if (eps_values[i] >= eps_values[i - 1])
      throw Error(ErrorKind::validation, "epsilon values must be strictly decreasing");

  const Solution topk = stability_select_topk(pool, pm, y, k);

  ParetoFrontier frontier;
  frontier.pool_fingerprint = pool_fingerprint(pool);
  CutStore cuts;
  std::vector<int> warm = topk.support;

  for (double eps : eps_values) {
    if (!opt.reuse_cuts) {
      cuts.clear();
      warm = topk.support;
    }
    SolveStats stats;
    Solution sol = solve_fixed_epsilon(pool, pm, y, k, eps, cuts, warm, &stats, opt.solver);
    frontier.cuts_generated += stats.cuts_added;
    frontier.iterations_per_eps.push_back(stats.iterations);
    warm = sol.support;  // nested feasibility: valid start for the next bound
    frontier.points.push_back(ParetoPoint{eps, std::move(sol)});
  }
  return frontier;
}

}  // namespace moss
