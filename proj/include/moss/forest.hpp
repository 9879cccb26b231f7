// Candidate rule generation. A forest of shallow CART regression trees is
// fit on bootstrap resamples with split thresholds restricted to a per
// feature quantile grid; every root-to-node path becomes a candidate rule
// and the fraction of trees containing a rule is its selection proportion.
// Restricting thresholds to the grid is what makes identical rules
// rediscoverable across trees, so the proportions are meaningful.
#pragma once

#include <cstdint>
#include <vector>

#include "moss/data.hpp"
#include "moss/pool.hpp"

namespace moss {

struct ForestConfig {
  int trees = 500;
  int max_depth = 2;      // interactions up to this order; valid range [1, 3]
  int mtry = 0;           // features tried per node; 0 = ceil(p / 3)
  int min_leaf = 5;       // minimum bootstrap rows per child
  int quantiles = 10;     // q: thresholds at i/q quantiles, i = 1..q-1
  int max_rules = 1000;   // pool truncation after sorting by proportion
  double response_noise_sigma = 0.0;  // per-tree target jitter, in sd(y) units
  bool leaves_only = false;           // drop interior-node paths when true
  std::uint64_t seed = 0;
};

// Per-feature candidate thresholds: the i/q quantiles (i = 1..q-1) of the
// training values, deduplicated, excluding any value no row exceeds (a split
// there would have an empty side). A constant feature gets an empty list.
struct QuantileGrid {
  std::vector<std::vector<double>> thresholds;
};

QuantileGrid compute_quantile_grid(const Dataset& data, int q);

// feature < 0 marks a leaf. `value` is the mean bootstrap target in the node.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct Forest {
  std::vector<Tree> trees;
};

// Deterministic for a fixed config: tree t draws from an RNG stream derived
// from (seed, t), so any thread count produces the same forest.
Forest fit_forest(const Dataset& data, const ForestConfig& cfg);

// Collects paths into a pool with proportions, output values recomputed on
// the original rows, sorted by proportion descending (ties by canonical
// split order) and truncated to max_rules.
CandidatePool extract_pool(const Forest& forest, const Dataset& data,
                           const ForestConfig& cfg);

// fit_forest + extract_pool.
CandidatePool generate_rules(const Dataset& data, const ForestConfig& cfg);

}  // namespace moss
