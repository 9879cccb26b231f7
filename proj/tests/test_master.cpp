// The branch-and-bound master. Correctness story: a brute-force enumeration
// over all binary points is cheap for m <= 12, so the solver is held to
// exact agreement with it across random cut sets.
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "moss/errors.hpp"
#include "moss/master.hpp"
#include "moss/random.hpp"

using mosstest::error_kind;

namespace {

// Exhaustive minimum of max-cut over all feasible binary points. Returns
// +inf when no point is feasible.
double enumerate_master(const moss::MasterProblem& mp) {
  const int m = static_cast<int>(mp.pi.size());
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> support;
    double pisum = 0.0;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1u) {
        support.push_back(i);
        pisum += mp.pi(i);
      }
    if (static_cast<int>(support.size()) > mp.k) continue;
    if (pisum < mp.epsilon - moss::kMasterFeasSlack) continue;
    double nu = -std::numeric_limits<double>::infinity();
    for (const auto& cut : mp.cuts->cuts)
      nu = std::max(nu, cut.value_at(support));
    best = std::min(best, nu);
  }
  return best;
}

moss::Cut make_cut(std::vector<double> a, double b) {
  moss::Cut cut;
  cut.a = Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<long>(a.size()));
  cut.b = b;
  return cut;
}

}  // namespace

TEST_SUITE_BEGIN("master");

TEST_CASE("check_feasible compares epsilon against the top-k sum") {
  Eigen::VectorXd pi(4);
  pi << 0.9, 0.7, 0.5, 0.2;
  CHECK(moss::check_feasible(pi, 2, 1.6));
  CHECK_FALSE(moss::check_feasible(pi, 2, 1.61));
  CHECK(moss::check_feasible(pi, 2, 0.0));
  CHECK(moss::check_feasible(pi, 1, 0.9));
  CHECK_FALSE(moss::check_feasible(pi, 1, 0.91));
  CHECK(moss::check_feasible(pi, 4, 2.3));
}

TEST_CASE("three-variable example lands on z = {1}") {
  // Feasible supports under k=1, eps=0.5: {0} gives nu = 2, {1} gives 1.
  moss::CutStore cuts;
  cuts.cuts.push_back(make_cut({-1.0, -2.0, 0.0}, 3.0));
  moss::MasterProblem mp;
  mp.cuts = &cuts;
  mp.pi.resize(3);
  mp.pi << 0.9, 0.5, 0.4;
  mp.epsilon = 0.5;
  mp.k = 1;
  const auto res = moss::solve_master(mp);
  CHECK(res.support == std::vector<int>{1});
  CHECK(res.nu == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant cut: nu = b regardless of the chosen point") {
  moss::CutStore cuts;
  cuts.cuts.push_back(make_cut({0.0, 0.0, 0.0, 0.0}, 2.5));
  moss::MasterProblem mp;
  mp.cuts = &cuts;
  mp.pi.resize(4);
  mp.pi << 0.4, 0.3, 0.2, 0.1;
  mp.epsilon = 0.0;
  mp.k = 4;
  const auto res = moss::solve_master(mp);
  CHECK(res.nu == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(static_cast<int>(res.support.size()) <= 4);
}

TEST_CASE("random instances match exhaustive enumeration exactly") {
  moss::Rng rng(9090);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3 + static_cast<int>(rng.below(10));  // up to 12
    const int ncuts = 1 + static_cast<int>(rng.below(4));
    moss::CutStore cuts;
    for (int j = 0; j < ncuts; ++j) {
      std::vector<double> a(static_cast<std::size_t>(m));
      // Gradient-shaped cuts: non-positive coefficients.
      for (auto& v : a) v = -2.0 * rng.uniform01();
      cuts.cuts.push_back(make_cut(std::move(a), 5.0 * rng.uniform01()));
    }
    moss::MasterProblem mp;
    mp.cuts = &cuts;
    mp.pi.resize(m);
    for (int i = 0; i < m; ++i) mp.pi(i) = rng.uniform01();
    mp.k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    // Epsilon in [0, top-k sum] so the instance is feasible.
    std::vector<double> sorted(mp.pi.data(), mp.pi.data() + m);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double eps_max = 0.0;
    for (int i = 0; i < mp.k; ++i) eps_max += sorted[static_cast<std::size_t>(i)];
    mp.epsilon = eps_max * rng.uniform01();

    const auto res = moss::solve_master(mp);
    const double brute = enumerate_master(mp);
    CHECK(std::abs(res.nu - brute) <= 1e-9 * (1.0 + std::abs(brute)));

    // Returned point satisfies both constraints and nu is the exact max cut.
    double pisum = 0.0;
    for (int i : res.support) pisum += mp.pi(i);
    CHECK(pisum >= mp.epsilon - 1e-12);
    CHECK(static_cast<int>(res.support.size()) <= mp.k);
    double max_cut = -std::numeric_limits<double>::infinity();
    for (const auto& cut : cuts.cuts)
      max_cut = std::max(max_cut, cut.value_at(res.support));
    CHECK(res.nu == doctest::Approx(max_cut).epsilon(1e-12));
  }
}

TEST_CASE("infeasible epsilon raises with epsilon_max in the details") {
  moss::CutStore cuts;
  cuts.cuts.push_back(make_cut({-1.0, -1.0}, 1.0));
  moss::MasterProblem mp;
  mp.cuts = &cuts;
  mp.pi.resize(2);
  mp.pi << 0.6, 0.3;
  mp.k = 1;
  mp.epsilon = 0.7;
  CHECK(error_kind([&] { moss::solve_master(mp); }) ==
        moss::ErrorKind::infeasible);
}

TEST_CASE("warm start never degrades the optimum") {
  moss::Rng rng(4321);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 8;
    moss::CutStore cuts;
    for (int j = 0; j < 3; ++j) {
      std::vector<double> a(m);
      for (auto& v : a) v = -rng.uniform01();
      cuts.cuts.push_back(make_cut(std::move(a), 3.0 * rng.uniform01()));
    }
    moss::MasterProblem mp;
    mp.cuts = &cuts;
    mp.pi.resize(m);
    for (int i = 0; i < m; ++i) mp.pi(i) = rng.uniform01();
    mp.k = 3;
    mp.epsilon = 0.0;
    const auto cold = moss::solve_master(mp);
    // Use the cold optimum itself as the warm start; result must agree.
    mp.warm = cold.support;
    const auto warm = moss::solve_master(mp);
    CHECK(warm.nu == doctest::Approx(cold.nu).epsilon(1e-9));
  }
}

TEST_CASE("nu is non-decreasing in epsilon for fixed cuts") {
  moss::Rng rng(2468);
  const int m = 7;
  moss::CutStore cuts;
  for (int j = 0; j < 4; ++j) {
    std::vector<double> a(m);
    for (auto& v : a) v = -1.5 * rng.uniform01();
    cuts.cuts.push_back(make_cut(std::move(a), 4.0 * rng.uniform01()));
  }
  moss::MasterProblem mp;
  mp.cuts = &cuts;
  mp.pi.resize(m);
  for (int i = 0; i < m; ++i) mp.pi(i) = rng.uniform01();
  mp.k = 3;
  std::vector<double> sorted(mp.pi.data(), mp.pi.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const double eps_max = sorted[0] + sorted[1] + sorted[2];
  double prev = -std::numeric_limits<double>::infinity();
  for (int step = 0; step <= 10; ++step) {
    mp.epsilon = eps_max * step / 10.0;
    const auto res = moss::solve_master(mp);
    CHECK(res.nu >= prev - 1e-9);
    prev = res.nu;
  }
}

TEST_CASE("tiny node budget trips the iteration-limit error") {
  // Two crossing cuts under k=1 leave the root relaxation at z = (1/2, 1/2)
  // with bound 1/2, strictly below the integer optimum of 1, so proving
  // optimality requires branching past a one-node budget.
  moss::CutStore cuts;
  cuts.cuts.push_back(make_cut({-1.0, 0.0}, 1.0));
  cuts.cuts.push_back(make_cut({0.0, -1.0}, 1.0));
  moss::MasterProblem mp;
  mp.cuts = &cuts;
  mp.pi.resize(2);
  mp.pi << 0.5, 0.5;
  mp.k = 1;
  mp.epsilon = 0.0;
  moss::MasterOptions opt;
  opt.node_budget = 1;
  CHECK(error_kind([&] { moss::solve_master(mp, opt); }) ==
        moss::ErrorKind::iteration_limit);

  // The same instance solves fine under the default budget.
  const auto res = moss::solve_master(mp);
  CHECK(res.nu == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("write_lp_format emits the objective and both constraint blocks") {
  moss::CutStore cuts;
  cuts.cuts.push_back(make_cut({-1.0, -2.0}, 3.0));
  moss::MasterProblem mp;
  mp.cuts = &cuts;
  mp.pi.resize(2);
  mp.pi << 0.9, 0.5;
  mp.epsilon = 0.5;
  mp.k = 1;
  std::ostringstream out;
  moss::write_lp_format(mp, out);
  const std::string text = out.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("nu") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
}

TEST_SUITE_END();
