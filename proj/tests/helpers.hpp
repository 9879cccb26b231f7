// Shared fixtures for the unit suites: tiny hand-built pools, synthetic
// datasets with a planted rule signal, and an error-kind probe.
#pragma once

#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "moss/data.hpp"
#include "moss/errors.hpp"
#include "moss/pool.hpp"
#include "moss/random.hpp"
#include "moss/rules.hpp"

namespace mosstest {

// Runs `fn`, expecting it to throw moss::Error; returns the kind.
template <typename Fn>
moss::ErrorKind error_kind(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const moss::Error& e) {
    return e.kind();
  }
  FAIL("expected a moss::Error");
  return moss::ErrorKind::config;
}

inline moss::Split le(int f, double t) {
  return moss::Split{f, t, moss::SplitDir::le};
}
inline moss::Split gt(int f, double t) {
  return moss::Split{f, t, moss::SplitDir::gt};
}

inline moss::DecisionRule rule(std::vector<moss::Split> splits, double mu_in,
                               double mu_out) {
  moss::DecisionRule r;
  r.splits = moss::canonicalize(std::move(splits));
  r.mu_in = mu_in;
  r.mu_out = mu_out;
  return r;
}

// Pool with the given rules and proportions, no generation metadata.
inline moss::CandidatePool pool_of(std::vector<moss::DecisionRule> rules,
                                   std::vector<double> pi) {
  moss::CandidatePool pool;
  pool.rules = std::move(rules);
  pool.pi = std::move(pi);
  return pool;
}

// n rows, p features uniform on [0, 10); y = step(x0 > 5) + step(x1 <= 3)
// + noise. The step structure keeps shallow trees finding the same splits.
inline moss::Dataset synthetic_dataset(int n, int p, std::uint64_t seed,
                                       double noise = 0.1) {
  moss::Rng rng(seed);
  moss::Dataset data;
  data.features.resize(n, p);
  data.target.resize(n);
  data.feature_names.clear();
  for (int j = 0; j < p; ++j)
    data.feature_names.push_back("x" + std::to_string(j));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) data.features(i, j) = 10.0 * rng.uniform01();
    double y = 0.0;
    if (data.features(i, 0) > 5.0) y += 2.0;
    if (p > 1 && data.features(i, 1) <= 3.0) y += 1.0;
    data.target(i) = y + noise * rng.normal();
  }
  return data;
}

// Small pool of single-split rules on distinct features of `data`, with
// descending proportions. Membership varies by row, so prediction columns
// are non-constant and the ridge subproblems are well posed.
inline moss::CandidatePool threshold_pool(const moss::Dataset& data, int m,
                                          std::uint64_t seed) {
  moss::Rng rng(seed);
  const int n = static_cast<int>(data.features.rows());
  const int p = static_cast<int>(data.features.cols());
  moss::CandidatePool pool;
  for (int i = 0; i < m; ++i) {
    const int f = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
    // Threshold at a random interior row's value, so both sides are hit.
    Eigen::VectorXd col = data.features.col(f);
    std::vector<double> vals(col.data(), col.data() + n);
    std::sort(vals.begin(), vals.end());
    const int lo = n / 4, hi = 3 * n / 4;
    const double t = vals[static_cast<std::size_t>(
        lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo))))];
    const auto dir = rng.below(2) == 0 ? moss::SplitDir::le : moss::SplitDir::gt;
    moss::DecisionRule r;
    r.splits = {moss::Split{f, t, dir}};
    // In/out means from the actual rows keeps the rule informative.
    double sum_in = 0, sum_out = 0;
    int c_in = 0, c_out = 0;
    for (int row = 0; row < n; ++row) {
      if (r.splits[0].holds(data.features(row, f))) {
        sum_in += data.target(row);
        ++c_in;
      } else {
        sum_out += data.target(row);
        ++c_out;
      }
    }
    if (c_in == 0 || c_out == 0) {
      --i;  // degenerate draw; try again
      continue;
    }
    r.mu_in = sum_in / c_in;
    r.mu_out = sum_out / c_out;
    // Skip identity duplicates so pool invariants (unique rules) hold.
    bool dup = false;
    for (const auto& existing : pool.rules)
      if (moss::same_rule(existing, r)) dup = true;
    if (dup) {
      --i;
      continue;
    }
    pool.rules.push_back(std::move(r));
    pool.pi.push_back(1.0 - 0.9 * static_cast<double>(i) / m);
  }
  return pool;
}

}  // namespace mosstest
