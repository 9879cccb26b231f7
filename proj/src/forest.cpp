#include "moss/forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "moss/errors.hpp"
#include "moss/parallel.hpp"
#include "moss/random.hpp"

namespace moss {

namespace {

void validate_config(const ForestConfig& cfg) {
  if (cfg.trees < 1) throw Error(ErrorKind::validation, "need at least one tree");
  if (cfg.max_depth < 1 || cfg.max_depth > 3)
    throw Error(ErrorKind::validation, "max_depth must be in [1, 3]");
  if (cfg.min_leaf < 1) throw Error(ErrorKind::validation, "min_leaf must be >= 1");
  if (cfg.quantiles < 2) throw Error(ErrorKind::validation, "quantiles must be >= 2");
  if (cfg.max_rules < 1) throw Error(ErrorKind::validation, "max_rules must be >= 1");
  if (cfg.mtry < 0) throw Error(ErrorKind::validation, "mtry must be >= 0");
  if (cfg.response_noise_sigma < 0.0)
    throw Error(ErrorKind::validation, "response_noise_sigma must be >= 0");
}

int resolve_mtry(const ForestConfig& cfg, int p) {
  int mtry = cfg.mtry > 0 ? cfg.mtry : (p + 2) / 3;  // ceil(p / 3)
  return std::min(mtry, p);
}

struct TreeGrower {
  const Dataset& data;
  const QuantileGrid& grid;
  const ForestConfig& cfg;
  int mtry;
  Rng rng;
  std::vector<int> rows;        // bootstrap row ids, with repetition
  std::vector<double> targets;  // bootstrap targets, noise included
  Tree tree;
  std::vector<int> feature_buf;

  TreeGrower(const Dataset& d, const QuantileGrid& g, const ForestConfig& c,
             int mtry_, std::uint64_t seed)
      : data(d), grid(g), cfg(c), mtry(mtry_), rng(seed) {}

  void grow(double noise_sd) {
    const int n = static_cast<int>(data.n());
    rows.resize(static_cast<std::size_t>(n));
    targets.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      rows[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    for (int i = 0; i < n; ++i) {
      double y = data.target[rows[static_cast<std::size_t>(i)]];
      if (noise_sd > 0.0) y += noise_sd * rng.normal();
      targets[static_cast<std::size_t>(i)] = y;
    }
    std::vector<int> member(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) member[static_cast<std::size_t>(i)] = i;
    build(member, 0);
  }

  // Appends the subtree rooted at `member` (indices into rows/targets) and
  // returns its node id.
  int build(const std::vector<int>& member, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});

    double sum = 0.0, sq = 0.0;
    for (int i : member) {
      const double y = targets[static_cast<std::size_t>(i)];
      sum += y;
      sq += y * y;
    }
    const double count = static_cast<double>(member.size());
    tree.nodes[static_cast<std::size_t>(id)].value = sum / count;

    if (depth >= cfg.max_depth) return id;
    const double node_sse = std::max(0.0, sq - sum * sum / count);
    // A numerically pure node has nothing to gain from splitting.
    if (node_sse <= 1e-12 * (sq + 1.0)) return id;

    rng.sample_without_replacement(static_cast<int>(data.p()), mtry, feature_buf);
    std::vector<int> features = feature_buf;
    std::sort(features.begin(), features.end());  // tie-breaks independent of draw order

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 0.0;
    for (int f : features) {
      for (double t : grid.thresholds[static_cast<std::size_t>(f)]) {
        double suml = 0.0;
        int cl = 0;
        for (int i : member) {
          if (data.features(rows[static_cast<std::size_t>(i)], f) <= t) {
            suml += targets[static_cast<std::size_t>(i)];
            ++cl;
          }
        }
        const int cr = static_cast<int>(member.size()) - cl;
        if (cl < cfg.min_leaf || cr < cfg.min_leaf) continue;
        const double sumr = sum - suml;
        const double gain = suml * suml / cl + sumr * sumr / cr - sum * sum / count;
        // Must beat the incumbent by a material margin, so scan order
        // (ascending feature, ascending threshold) settles exact ties.
        if (gain > best_gain + 1e-12 * node_sse) {
          best_gain = gain;
          best_feature = f;
          best_threshold = t;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<int> left_rows, right_rows;
    for (int i : member) {
      if (data.features(rows[static_cast<std::size_t>(i)], best_feature) <= best_threshold)
        left_rows.push_back(i);
      else
        right_rows.push_back(i);
    }
    tree.nodes[static_cast<std::size_t>(id)].feature = best_feature;
    tree.nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
    const int left = build(left_rows, depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].left = left;
    const int right = build(right_rows, depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].right = right;
    return id;
  }
};

}  // namespace

QuantileGrid compute_quantile_grid(const Dataset& data, int q) {
  if (q < 2) throw Error(ErrorKind::validation, "quantiles must be >= 2");
  const int n = static_cast<int>(data.n());
  QuantileGrid grid;
  grid.thresholds.resize(static_cast<std::size_t>(data.p()));
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Eigen::Index f = 0; f < data.p(); ++f) {
    for (int i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = data.features(i, f);
    std::sort(column.begin(), column.end());
    const double top = column.back();
    std::vector<double>& out = grid.thresholds[static_cast<std::size_t>(f)];
    out.clear();
    for (int i = 1; i < q; ++i) {
      // 1-indexed order statistic at ceil(i * n / q).
      const int rank = (i * n + q - 1) / q;
      const double value = column[static_cast<std::size_t>(rank - 1)];
      if (value >= top) continue;  // no row can fall on the > side
      if (out.empty() || value > out.back()) out.push_back(value);
    }
  }
  return grid;
}

Forest fit_forest(const Dataset& data, const ForestConfig& cfg) {
  validate(data);
  validate_config(cfg);
  const int n = static_cast<int>(data.n());
  const double mean = data.target.mean();
  double var = 0.0;
  for (int i = 0; i < n; ++i) var += (data.target[i] - mean) * (data.target[i] - mean);
  var /= static_cast<double>(n - 1);
  if (var == 0.0)
    throw Error(ErrorKind::degenerate_data, "target is constant; no split can help");
  const double noise_sd = cfg.response_noise_sigma * std::sqrt(var);

  // More quantiles than rows buys nothing; clamp keeps ranks meaningful.
  const QuantileGrid grid = compute_quantile_grid(data, std::min(cfg.quantiles, n));
  const int mtry = resolve_mtry(cfg, static_cast<int>(data.p()));

  Forest forest;
  forest.trees.resize(static_cast<std::size_t>(cfg.trees));
  parallel_for(cfg.trees, [&](int t) {
    TreeGrower grower(data, grid, cfg, mtry, derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    grower.grow(noise_sd);
    forest.trees[static_cast<std::size_t>(t)] = std::move(grower.tree);
  });
  return forest;
}

namespace {

struct IdentityLess {
  bool operator()(const std::vector<Split>& a, const std::vector<Split>& b) const {
    return rule_identity_less(a, b);
  }
};

void collect_paths(const Tree& tree, int node, std::vector<Split>& path,
                   bool leaves_only,
                   std::map<std::vector<Split>, int, IdentityLess>& seen) {
  const TreeNode& cur = tree.nodes[static_cast<std::size_t>(node)];
  const bool is_leaf = cur.feature < 0;
  if (!path.empty() && (is_leaf || !leaves_only)) {
    // Paths never contradict (a child on the empty side of a repeated split
    // would have been rejected by min_leaf), so canonicalize cannot throw.
    seen.emplace(canonicalize(path), 0);
  }
  if (is_leaf) return;
  path.push_back(Split{cur.feature, cur.threshold, SplitDir::le});
  collect_paths(tree, cur.left, path, leaves_only, seen);
  path.back() = Split{cur.feature, cur.threshold, SplitDir::gt};
  collect_paths(tree, cur.right, path, leaves_only, seen);
  path.pop_back();
}

}  // namespace

CandidatePool extract_pool(const Forest& forest, const Dataset& data,
                           const ForestConfig& cfg) {
  validate(data);
  const int b = static_cast<int>(forest.trees.size());
  if (b == 0) throw Error(ErrorKind::validation, "empty forest");

  // Count each rule once per tree that contains it anywhere.
  std::vector<std::map<std::vector<Split>, int, IdentityLess>> per_tree(
      static_cast<std::size_t>(b));
  parallel_for(b, [&](int t) {
    std::vector<Split> path;
    collect_paths(forest.trees[static_cast<std::size_t>(t)], 0, path,
                  cfg.leaves_only, per_tree[static_cast<std::size_t>(t)]);
  });
  std::map<std::vector<Split>, int, IdentityLess> counts;
  for (int t = 0; t < b; ++t)
    for (const auto& [splits, unused] : per_tree[static_cast<std::size_t>(t)])
      ++counts[splits];

  const int n = static_cast<int>(data.n());
  struct Candidate {
    DecisionRule rule;
    double pi;
  };
  std::vector<Candidate> candidates;
  std::vector<char> inside(static_cast<std::size_t>(n));
  for (const auto& [splits, tree_count] : counts) {
    DecisionRule rule;
    rule.splits = splits;
    int n_in = 0;
    for (int i = 0; i < n; ++i) {
      inside[static_cast<std::size_t>(i)] =
          rule.contains(data.features.row(i).transpose()) ? 1 : 0;
      n_in += inside[static_cast<std::size_t>(i)];
    }
    // Regions that no original row hits (or that every row hits) carry no
    // signal; resampling artifacts like these are dropped.
    if (n_in == 0 || n_in == n) continue;
    double sum_in = 0.0, sum_out = 0.0;
    for (int i = 0; i < n; ++i) {
      if (inside[static_cast<std::size_t>(i)])
        sum_in += data.target[i];
      else
        sum_out += data.target[i];
    }
    rule.mu_in = sum_in / n_in;
    rule.mu_out = sum_out / (n - n_in);
    candidates.push_back(Candidate{std::move(rule),
                                   static_cast<double>(tree_count) / b});
  }
  if (candidates.empty())
    throw Error(ErrorKind::empty_pool, "no usable rules extracted from the forest");

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b2) {
                     if (a.pi != b2.pi) return a.pi > b2.pi;
                     return rule_identity_less(a.rule.splits, b2.rule.splits);
                   });
  if (static_cast<int>(candidates.size()) > cfg.max_rules)
    candidates.resize(static_cast<std::size_t>(cfg.max_rules));

  CandidatePool pool;
  pool.meta = GenerationMeta{b, cfg.max_depth, cfg.quantiles, cfg.seed};
  for (Candidate& c : candidates) {
    pool.rules.push_back(std::move(c.rule));
    pool.pi.push_back(c.pi);
  }
  return pool;
}

CandidatePool generate_rules(const Dataset& data, const ForestConfig& cfg) {
  return extract_pool(fit_forest(data, cfg), data, cfg);
}

}  // namespace moss
