#include "moss/pool.hpp"

#include <cstdio>
#include <cstring>
#include <string>

#include "moss/errors.hpp"

namespace moss {

PredictionMatrix build_prediction_matrix(const CandidatePool& pool,
                                         const Dataset& data, double gamma) {
  if (gamma <= 0.0)
    throw Error(ErrorKind::gamma_not_positive,
                "gamma must be > 0, got " + std::to_string(gamma));
  if (pool.rules.empty())
    throw Error(ErrorKind::empty_pool, "cannot build prediction matrix from empty pool");
  for (const DecisionRule& r : pool.rules)
    for (const Split& s : r.splits)
      if (s.feature < 0 || s.feature >= data.p())
        throw Error(ErrorKind::dimension_mismatch,
                    "rule references feature " + std::to_string(s.feature) +
                        " but dataset has " + std::to_string(data.p()) + " columns");

  const Eigen::Index n = data.n();
  PredictionMatrix pm;
  pm.gamma = gamma;
  pm.target_mean = data.target.mean();
  pm.m.resize(n, static_cast<Eigen::Index>(pool.rules.size()));
  pm.column_means.resize(static_cast<Eigen::Index>(pool.rules.size()));

  for (std::size_t j = 0; j < pool.rules.size(); ++j) {
    const DecisionRule& r = pool.rules[j];
    const Eigen::Index col = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < n; ++i)
      pm.m(i, col) = rule_predict(r, data.features.row(i).transpose());
    const double mean = pm.m.col(col).mean();
    pm.column_means[col] = mean;
    pm.m.col(col).array() -= mean;
  }
  return pm;
}

std::string pool_fingerprint(const CandidatePool& pool) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix64 = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  auto mixd = [&](double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    mix64(bits);
  };
  mix64(static_cast<std::uint64_t>(pool.rules.size()));
  for (std::size_t i = 0; i < pool.rules.size(); ++i) {
    mix64(hash_splits(pool.rules[i].splits));
    mixd(pool.rules[i].mu_in);
    mixd(pool.rules[i].mu_out);
    mixd(pool.pi[i]);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace moss
