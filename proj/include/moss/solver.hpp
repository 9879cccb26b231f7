// Exact selection solvers. solve_fixed_epsilon runs the cutting-plane loop
// for one stability bound; compute_pareto sweeps a descending list of bounds
// and reuses every accumulated cut, which is sound because cuts
// underestimate h2 globally and do not depend on the bound being solved.
#pragma once

#include <vector>

#include "moss/master.hpp"
#include "moss/objective.hpp"
#include "moss/pool.hpp"

namespace moss {

// Deduplicated, strictly decreasing ladder of attainable h1 levels: sums of
// k consecutive entries of the descending-sorted proportions. values[0] is
// the maximum attainable h1 for supports of size k.
struct EpsilonSequence {
  std::vector<double> values;

  double max() const { return values.front(); }
  int size() const { return static_cast<int>(values.size()); }
  // Element by rank with clamping (rank 0 = largest).
  double at_clamped(int rank) const {
    if (rank < 0) rank = 0;
    if (rank >= size()) rank = size() - 1;
    return values[static_cast<std::size_t>(rank)];
  }
};

EpsilonSequence epsilon_sequence(const std::vector<double>& pi, int k);

// Baseline: the k rules with the largest proportions (pool order breaks
// ties), ridge weights refit on that support.
Solution stability_select_topk(const CandidatePool& pool, const PredictionMatrix& pm,
                               const Eigen::VectorXd& y, int k);

struct SolveStats {
  int iterations = 0;   // outer cutting-plane rounds
  int cuts_added = 0;
  long masters = 0;
  long nodes = 0;       // LP relaxations across all master solves
};

struct SolverOptions {
  // Outer loop stops once the incumbent h2 is within
  // delta_factor * (1 + |h2|) of the master lower bound.
  double delta_factor = 1e-6;
  int max_outer = 500;
  MasterOptions master;
};

// One epsilon-constrained solve. `warm` must be a feasible support for
// `epsilon`; cuts accumulate into `cuts` and may carry over from earlier
// solves against the same pool/matrix. The returned solution's h2 never
// exceeds the warm start's.
Solution solve_fixed_epsilon(const CandidatePool& pool, const PredictionMatrix& pm,
                             const Eigen::VectorXd& y, int k, double epsilon,
                             CutStore& cuts, const std::vector<int>& warm,
                             SolveStats* stats = nullptr,
                             const SolverOptions& opt = {});

struct ParetoOptions {
  SolverOptions solver;
  // true: share cuts and warm starts down the sweep (the intended mode).
  // false: every bound is solved cold from the top-k start; used to verify
  // that reuse changes nothing but the work done.
  bool reuse_cuts = true;
};

// eps_values must be strictly decreasing and feasible for (pool, k).
ParetoFrontier compute_pareto(const CandidatePool& pool, const PredictionMatrix& pm,
                              const Eigen::VectorXd& y, int k,
                              const std::vector<double>& eps_values,
                              const ParetoOptions& opt = {});

}  // namespace moss
