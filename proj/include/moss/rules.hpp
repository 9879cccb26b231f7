// Decision rules: axis-aligned regions described by a canonical list of
// threshold splits, with a two-valued output (one value inside the region,
// another outside). Rule identity is the canonical split list alone; the two
// output values are fitted quantities and never enter comparisons.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moss/errors.hpp"

namespace moss {

enum class SplitDir : std::uint8_t { le = 0, gt = 1 };

struct Split {
  int feature = 0;
  double threshold = 0.0;
  SplitDir dir = SplitDir::le;

  bool holds(double value) const {
    return dir == SplitDir::le ? value <= threshold : value > threshold;
  }

  bool satisfied_by(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return holds(x[feature]);
  }
};

inline bool operator==(const Split& a, const Split& b) {
  return a.feature == b.feature && a.threshold == b.threshold && a.dir == b.dir;
}

// Canonical order: (feature, threshold, direction) with le before gt.
inline bool operator<(const Split& a, const Split& b) {
  if (a.feature != b.feature) return a.feature < b.feature;
  if (a.threshold != b.threshold) return a.threshold < b.threshold;
  return static_cast<int>(a.dir) < static_cast<int>(b.dir);
}

struct DecisionRule {
  std::vector<Split> splits;  // canonical order, see canonicalize()
  double mu_in = 0.0;         // predicted value inside the region
  double mu_out = 0.0;        // predicted value outside

  int depth() const { return static_cast<int>(splits.size()); }

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    for (const Split& s : splits)
      if (!s.satisfied_by(x)) return false;
    return true;
  }
};

// Sorts splits into canonical order, removes exact duplicates and rejects a
// pair that splits the same feature at the same threshold in both directions
// (the region would be empty by construction).
inline std::vector<Split> canonicalize(std::vector<Split> splits) {
  if (splits.empty())
    throw Error(ErrorKind::empty_split_list, "rule must have at least one split");
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  for (std::size_t i = 1; i < splits.size(); ++i) {
    if (splits[i].feature == splits[i - 1].feature &&
        splits[i].threshold == splits[i - 1].threshold)
      throw Error(ErrorKind::contradictory_splits,
                  "splits on feature " + std::to_string(splits[i].feature) +
                      " contradict at threshold " + std::to_string(splits[i].threshold));
  }
  return splits;
}

inline double rule_predict(const DecisionRule& r, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return r.contains(x) ? r.mu_in : r.mu_out;
}

// Identity comparisons (canonical split lists, lexicographic).
inline bool same_rule(const DecisionRule& a, const DecisionRule& b) {
  return a.splits == b.splits;
}

inline bool rule_identity_less(const std::vector<Split>& a, const std::vector<Split>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline std::uint64_t hash_splits(const std::vector<Split>& splits) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  auto mix = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const Split& s : splits) {
    mix(static_cast<std::uint64_t>(s.feature) << 1 | static_cast<std::uint64_t>(s.dir));
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(s.threshold));
    std::memcpy(&bits, &s.threshold, sizeof(bits));
    mix(bits);
  }
  return h;
}

}  // namespace moss
