// The master integer program of the cutting-plane loop:
//   minimize  nu
//   s.t.      nu >= a_j^T z + b_j          for every accumulated cut j
//             sum_i pi_i z_i >= epsilon
//             sum_i z_i <= k,  z binary.
// Solved exactly by a best-bound branch-and-bound whose node relaxation is
// the LP over z in [0,1]^m. A backend interface keeps the door open for an
// external MILP solver; the built-in backend is the default and needs no
// third-party code.
#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "moss/lp.hpp"

namespace moss {

// One outer-approximation cut nu >= a^T z + b. `origin` records the support
// the cut was generated at (diagnostics only).
struct Cut {
  Eigen::VectorXd a;
  double b = 0.0;
  std::vector<int> origin;

  // Exact cut value at a binary point given by its support.
  double value_at(const std::vector<int>& support) const {
    double v = b;
    for (int i : support) v += a[i];
    return v;
  }
};

struct CutStore {
  std::vector<Cut> cuts;
  int size() const { return static_cast<int>(cuts.size()); }
  void clear() { cuts.clear(); }
};

struct MasterProblem {
  const CutStore* cuts = nullptr;
  Eigen::VectorXd pi;
  double epsilon = 0.0;
  int k = 0;
  // Feasible warm-start support; becomes the initial incumbent.
  std::optional<std::vector<int>> warm;
};

struct MasterOptions {
  // Optimality gap tolerance is tol_factor * (1 + |incumbent nu|).
  double tol_factor = 1e-9;
  long node_budget = 1000000;
  LpOptions lp;
};

struct MasterResult {
  double nu = 0.0;             // exact max over cuts at the returned support
  std::vector<int> support;    // ascending indices of z = 1
  long nodes = 0;              // LP relaxations solved
};

// Slack applied to the stability constraint when judging integer points, so
// that a support whose pi-sum equals epsilon mathematically is never rejected
// over summation rounding.
constexpr double kMasterFeasSlack = 1e-12;

// True when some support of size <= k reaches epsilon, i.e. the sum of the k
// largest proportions is >= epsilon (minus rounding slack).
bool check_feasible(const Eigen::VectorXd& pi, int k, double epsilon);

class MasterBackend {
 public:
  virtual ~MasterBackend() = default;
  virtual MasterResult solve(const MasterProblem& mp, const MasterOptions& opt) = 0;
};

class BranchAndBoundBackend : public MasterBackend {
 public:
  MasterResult solve(const MasterProblem& mp, const MasterOptions& opt) override;
};

// Solves with the built-in backend. Throws Error(infeasible) when no support
// of size <= k reaches epsilon, Error(iteration_limit) past the node budget.
MasterResult solve_master(const MasterProblem& mp, const MasterOptions& opt = {});

// Debug dump in LP text format (readable by most MILP solvers).
void write_lp_format(const MasterProblem& mp, std::ostream& out);

}  // namespace moss
