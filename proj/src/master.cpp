#include "moss/master.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>
#include <tuple>

#include "moss/errors.hpp"
#include "moss/log.hpp"

namespace moss {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool check_feasible(const Eigen::VectorXd& pi, int k, double epsilon) {
  if (k < 0) return epsilon <= kMasterFeasSlack;
  std::vector<double> sorted(pi.data(), pi.data() + pi.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const std::size_t take = std::min<std::size_t>(sorted.size(), static_cast<std::size_t>(k));
  double total = 0.0;
  for (std::size_t i = 0; i < take; ++i) total += sorted[i];
  return total >= epsilon - kMasterFeasSlack;
}

namespace {

// Branch-and-bound over the box relaxation. Nodes live in an arena and carry
// only their incremental fixing; the full fixing vector is reconstructed by
// walking parents, which keeps a deep search cheap on memory.
class BnbSolver {
 public:
  BnbSolver(const MasterProblem& mp, const MasterOptions& opt)
      : mp_(mp), opt_(opt), m_(static_cast<int>(mp.pi.size())),
        jcount_(mp.cuts->size()) {
    // Index order by pi descending (ties by index) so greedy completion
    // works for any pi layout, not just pools already sorted descending.
    order_.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) order_[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return mp_.pi[a] > mp_.pi[b]; });
    build_base();
  }

  MasterResult run() {
    if (mp_.warm) {
      std::vector<signed char> z(static_cast<std::size_t>(m_), 0);
      for (int i : *mp_.warm) {
        if (i < 0 || i >= m_)
          throw Error(ErrorKind::index_out_of_range, "warm support index out of range");
        z[static_cast<std::size_t>(i)] = 1;
      }
      offer_incumbent(z);
      if (!has_best_)
        throw Error(ErrorKind::validation, "warm-start support is not feasible");
    }

    arena_.push_back(NodeRec{});
    eval_node(0);

    while (!heap_.empty()) {
      const auto [bound, order, id] = heap_.top();
      heap_.pop();
      (void)order;
      if (has_best_ && bound >= best_nu_ - tolerance()) break;
      branch(id);
    }

    if (!has_best_)
      throw Error(ErrorKind::numerical, "branch-and-bound finished without a feasible point");
    MasterResult result;
    result.nu = best_nu_;
    result.support = best_support_;
    result.nodes = lp_count_;
    return result;
  }

 private:
  struct NodeRec {
    int parent = -1;
    int fix_var = -1;
    signed char fix_val = 0;
    int branch_var = -1;
  };

  const MasterProblem& mp_;
  const MasterOptions& opt_;
  int m_ = 0;
  int jcount_ = 0;
  std::vector<int> order_;  // indices by pi descending
  LpProblem base_;
  Eigen::VectorXd row_scale_;

  std::vector<NodeRec> arena_;
  // Min-heap on (bound, insertion order): best bound first, FIFO on ties.
  std::priority_queue<std::tuple<double, long, int>,
                      std::vector<std::tuple<double, long, int>>,
                      std::greater<>>
      heap_;
  long push_counter_ = 0;
  long lp_count_ = 0;
  double best_nu_ = kInf;
  std::vector<int> best_support_;
  bool has_best_ = false;

  int nu_col() const { return m_; }
  int slack_col(int j) const { return m_ + 1 + j; }
  int stab_col() const { return m_ + 1 + jcount_; }
  int card_col() const { return m_ + 2 + jcount_; }

  double tolerance() const {
    return opt_.tol_factor * (1.0 + std::abs(best_nu_));
  }

  void build_base() {
    const int rows = jcount_ + 2;
    const int cols = m_ + jcount_ + 3;
    base_.a = RowMajorMatrix::Zero(rows, cols);
    base_.rhs = Eigen::VectorXd::Zero(rows);
    base_.c = Eigen::VectorXd::Zero(cols);
    base_.c[nu_col()] = 1.0;
    base_.lo = Eigen::VectorXd::Zero(cols);
    base_.up = Eigen::VectorXd::Constant(cols, kInf);
    for (int i = 0; i < m_; ++i) base_.up[i] = 1.0;
    base_.lo[nu_col()] = -kInf;

    row_scale_.resize(jcount_);
    for (int j = 0; j < jcount_; ++j) {
      const Cut& cut = mp_.cuts->cuts[j];
      if (cut.a.size() != m_)
        throw Error(ErrorKind::dimension_mismatch, "cut length does not match pool size");
      const double mag = std::max({1.0, cut.a.lpNorm<Eigen::Infinity>(), std::abs(cut.b)});
      const double sigma = 1.0 / mag;
      row_scale_[j] = sigma;
      for (int i = 0; i < m_; ++i) base_.a(j, i) = sigma * cut.a[i];
      base_.a(j, nu_col()) = -sigma;
      base_.a(j, slack_col(j)) = 1.0;
      base_.rhs[j] = -sigma * cut.b;
    }
    for (int i = 0; i < m_; ++i) base_.a(jcount_, i) = mp_.pi[i];
    base_.a(jcount_, stab_col()) = -1.0;
    base_.rhs[jcount_] = mp_.epsilon;
    for (int i = 0; i < m_; ++i) base_.a(jcount_ + 1, i) = 1.0;
    base_.a(jcount_ + 1, card_col()) = 1.0;
    base_.rhs[jcount_ + 1] = static_cast<double>(mp_.k);
  }

  void fixings_of(int id, std::vector<signed char>& fix) const {
    fix.assign(static_cast<std::size_t>(m_), -1);
    for (int cur = id; cur >= 0; cur = arena_[static_cast<std::size_t>(cur)].parent) {
      const NodeRec& n = arena_[static_cast<std::size_t>(cur)];
      if (n.fix_var >= 0) fix[static_cast<std::size_t>(n.fix_var)] = n.fix_val;
    }
  }

  // Sum of pi over a 0/1 vector in ascending index order; the pool is sorted
  // by pi descending, so this matches the summation order used when the
  // epsilon sequence was built and reproduces window sums bit for bit.
  double pi_sum(const std::vector<signed char>& z) const {
    double total = 0.0;
    for (int i = 0; i < m_; ++i)
      if (z[static_cast<std::size_t>(i)] == 1) total += mp_.pi[i];
    return total;
  }

  // Completes the fixings to the integer point that takes the k largest
  // available proportions. Since every cut has non-positive coefficients,
  // filling the cardinality budget never hurts the point's nu, and its
  // pi-sum is the maximum attainable in the subtree: if it misses epsilon
  // the whole node is infeasible.
  bool greedy_complete(const std::vector<signed char>& fix,
                       std::vector<signed char>& z) const {
    z.assign(static_cast<std::size_t>(m_), 0);
    int count = 0;
    for (int i = 0; i < m_; ++i)
      if (fix[static_cast<std::size_t>(i)] == 1) {
        z[static_cast<std::size_t>(i)] = 1;
        ++count;
      }
    if (count > mp_.k) return false;
    for (std::size_t pos = 0; pos < order_.size() && count < mp_.k; ++pos) {
      const int i = order_[pos];
      if (fix[static_cast<std::size_t>(i)] != -1) continue;
      z[static_cast<std::size_t>(i)] = 1;
      ++count;
    }
    return pi_sum(z) >= mp_.epsilon - kMasterFeasSlack;
  }

  double integer_nu(const std::vector<int>& support) const {
    double nu = -kInf;
    for (const Cut& cut : mp_.cuts->cuts) nu = std::max(nu, cut.value_at(support));
    return nu;
  }

  void offer_incumbent(const std::vector<signed char>& z) {
    std::vector<int> support;
    for (int i = 0; i < m_; ++i)
      if (z[static_cast<std::size_t>(i)] == 1) support.push_back(i);
    if (static_cast<int>(support.size()) > mp_.k) return;
    if (pi_sum(z) < mp_.epsilon - kMasterFeasSlack) return;
    const double nu = integer_nu(support);
    if (!has_best_ || nu < best_nu_) {
      has_best_ = true;
      best_nu_ = nu;
      best_support_ = std::move(support);
    }
  }

  void eval_node(int id) {
    std::vector<signed char> fix;
    fixings_of(id, fix);
    std::vector<signed char> z;
    if (!greedy_complete(fix, z)) return;  // provably infeasible subtree
    offer_incumbent(z);

    if (++lp_count_ > opt_.node_budget)
      throw Error(ErrorKind::iteration_limit,
                  "master node budget exhausted",
                  {{"node_budget", opt_.node_budget}});

    // Node LP: bounds narrowed by the fixings, started from the greedy point.
    LpProblem node = base_;
    for (int i = 0; i < m_; ++i) {
      const signed char f = fix[static_cast<std::size_t>(i)];
      if (f >= 0) {
        node.lo[i] = static_cast<double>(f);
        node.up[i] = static_cast<double>(f);
      }
    }

    std::vector<int> support;
    for (int i = 0; i < m_; ++i)
      if (z[static_cast<std::size_t>(i)] == 1) support.push_back(i);
    int jstar = 0;
    double nu0 = -kInf;
    for (int j = 0; j < jcount_; ++j) {
      const double v = mp_.cuts->cuts[static_cast<std::size_t>(j)].value_at(support);
      if (v > nu0) {
        nu0 = v;
        jstar = j;
      }
    }
    std::vector<int> basis(static_cast<std::size_t>(jcount_) + 2);
    for (int j = 0; j < jcount_; ++j)
      basis[static_cast<std::size_t>(j)] = j == jstar ? nu_col() : slack_col(j);
    basis[static_cast<std::size_t>(jcount_)] = stab_col();
    basis[static_cast<std::size_t>(jcount_) + 1] = card_col();

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(node.a.cols());
    for (int i = 0; i < m_; ++i) x0[i] = static_cast<double>(z[static_cast<std::size_t>(i)]);

    const LpResult lp = solve_lp(node, std::move(basis), std::move(x0), opt_.lp);
    if (lp.status == LpStatus::iteration_limit)
      throw Error(ErrorKind::iteration_limit, "node relaxation hit the simplex iteration cap");
    if (lp.status != LpStatus::optimal)
      throw Error(ErrorKind::numerical, "node relaxation failed");

    const double bound = lp.objective;
    if (has_best_ && bound >= best_nu_ - tolerance()) return;  // pruned

    // Integrality and branching decision.
    int branch_var = -1;
    double most_frac = 1e-9;
    for (int i = 0; i < m_; ++i) {
      if (fix[static_cast<std::size_t>(i)] != -1) continue;
      const double v = lp.x[i];
      const double dist = std::min(v, 1.0 - v);
      if (dist > most_frac) {
        most_frac = dist;
        branch_var = i;
      }
    }

    if (branch_var < 0) {
      // LP optimum is integral: fathom after offering the rounded point.
      std::vector<signed char> zi(static_cast<std::size_t>(m_), 0);
      for (int i = 0; i < m_; ++i)
        if (lp.x[i] > 0.5) zi[static_cast<std::size_t>(i)] = 1;
      std::vector<int> sup;
      for (int i = 0; i < m_; ++i)
        if (zi[static_cast<std::size_t>(i)] == 1) sup.push_back(i);
      const bool exact_ok = static_cast<int>(sup.size()) <= mp_.k &&
                            pi_sum(zi) >= mp_.epsilon - kMasterFeasSlack;
      if (exact_ok) {
        offer_incumbent(zi);
        return;
      }
      // The relaxation optimum sits on the stability boundary and rounds
      // infeasible; split on the lowest unfixed variable and recurse.
      for (int i = 0; i < m_ && branch_var < 0; ++i)
        if (fix[static_cast<std::size_t>(i)] == -1) branch_var = i;
      if (branch_var < 0) return;  // fully fixed: greedy already covered it
    }

    arena_[static_cast<std::size_t>(id)].branch_var = branch_var;
    heap_.emplace(bound, push_counter_++, id);
  }

  void branch(int id) {
    const int var = arena_[static_cast<std::size_t>(id)].branch_var;
    for (signed char val : {static_cast<signed char>(0), static_cast<signed char>(1)}) {
      NodeRec child;
      child.parent = id;
      child.fix_var = var;
      child.fix_val = val;
      arena_.push_back(child);
      eval_node(static_cast<int>(arena_.size()) - 1);
    }
  }
};

}  // namespace

MasterResult BranchAndBoundBackend::solve(const MasterProblem& mp,
                                          const MasterOptions& opt) {
  if (mp.cuts == nullptr || mp.cuts->cuts.empty())
    throw Error(ErrorKind::validation, "master problem needs at least one cut");
  if (mp.k < 0)
    throw Error(ErrorKind::validation, "cardinality bound must be non-negative");
  if (!check_feasible(mp.pi, mp.k, mp.epsilon)) {
    std::vector<double> sorted(mp.pi.data(), mp.pi.data() + mp.pi.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double eps_max = 0.0;
    for (int i = 0; i < std::min<int>(mp.k, static_cast<int>(sorted.size())); ++i)
      eps_max += sorted[static_cast<std::size_t>(i)];
    throw Error(ErrorKind::infeasible,
                "no support of size <= " + std::to_string(mp.k) +
                    " reaches the requested stability bound",
                {{"epsilon", mp.epsilon}, {"epsilon_max", eps_max}});
  }

  BnbSolver solver(mp, opt);
  MasterResult result = solver.run();
  if (log_enabled(LogLevel::debug))
    log_line(LogLevel::debug,
             "master: nu=" + std::to_string(result.nu) + " support=" +
                 std::to_string(result.support.size()) + " nodes=" +
                 std::to_string(result.nodes) + " cuts=" +
                 std::to_string(mp.cuts->size()));
  return result;
}

MasterResult solve_master(const MasterProblem& mp, const MasterOptions& opt) {
  BranchAndBoundBackend backend;
  return backend.solve(mp, opt);
}

void write_lp_format(const MasterProblem& mp, std::ostream& out) {
  const int m = static_cast<int>(mp.pi.size());
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "Minimize\n obj: nu\nSubject To\n";
  for (int j = 0; j < mp.cuts->size(); ++j) {
    const Cut& cut = mp.cuts->cuts[static_cast<std::size_t>(j)];
    out << " cut" << j << ": - nu";
    for (int i = 0; i < m; ++i)
      if (cut.a[i] != 0.0)
        out << (cut.a[i] >= 0 ? " + " : " - ") << num(std::abs(cut.a[i])) << " z" << i;
    out << " <= " << num(-cut.b) << "\n";
  }
  out << " stab:";
  for (int i = 0; i < m; ++i)
    out << (i ? " + " : " ") << num(mp.pi[i]) << " z" << i;
  out << " >= " << num(mp.epsilon) << "\n card:";
  for (int i = 0; i < m; ++i) out << (i ? " + " : " ") << "z" << i;
  out << " <= " << mp.k << "\nBounds\n nu free\nBinaries\n";
  for (int i = 0; i < m; ++i) out << " z" << i;
  out << "\nEnd\n";
}

}  // namespace moss
