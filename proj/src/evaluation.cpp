#include "moss/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "moss/cd.hpp"
#include "moss/errors.hpp"
#include "moss/log.hpp"
#include "moss/model.hpp"
#include "moss/objective.hpp"
#include "moss/random.hpp"

namespace moss {

Method parse_method(const std::string& name) {
  if (name == "topk") return Method::topk;
  if (name == "moss_h") return Method::moss_h;
  if (name == "moss_m") return Method::moss_m;
  if (name == "moss_l") return Method::moss_l;
  throw Error(ErrorKind::validation, "unknown method '" + name + "'");
}

const char* method_name(Method method) {
  switch (method) {
    case Method::topk: return "topk";
    case Method::moss_h: return "moss_h";
    case Method::moss_m: return "moss_m";
    case Method::moss_l: return "moss_l";
  }
  return "unknown";
}

double r_squared(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size())
    throw Error(ErrorKind::dimension_mismatch, "prediction length mismatch");
  if (y_true.size() < 2)
    throw Error(ErrorKind::validation, "need at least two observations");
  const double mean = y_true.mean();
  const double sst = (y_true.array() - mean).square().sum();
  if (sst == 0.0)
    throw Error(ErrorKind::constant_target, "target is constant on this split");
  const double sse = (y_true - y_pred).squaredNorm();
  return 1.0 - sse / sst;
}

namespace {

// Salt separating the fold-assignment stream from per-fold forest streams.
constexpr std::uint64_t kFoldSalt = 0xF01D;

}  // namespace

std::vector<std::vector<int>> cv_folds(int n, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::validation, "folds must be >= 2");
  if (n < folds)
    throw Error(ErrorKind::validation, "need at least one row per fold");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, kFoldSalt));
  rng.shuffle(order);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    const int lo = static_cast<int>(static_cast<long long>(n) * f / folds);
    const int hi = static_cast<int>(static_cast<long long>(n) * (f + 1) / folds);
    out[static_cast<std::size_t>(f)].assign(order.begin() + lo, order.begin() + hi);
    std::sort(out[static_cast<std::size_t>(f)].begin(),
              out[static_cast<std::size_t>(f)].end());
  }
  return out;
}

namespace {

void validate_experiment(const Dataset& data, const ExperimentConfig& cfg) {
  validate(data);
  if (cfg.folds < 2) throw Error(ErrorKind::validation, "folds must be >= 2");
  if (static_cast<int>(data.n()) < cfg.folds)
    throw Error(ErrorKind::validation, "need at least one row per fold");
  if (cfg.k < 1) throw Error(ErrorKind::validation, "k must be >= 1");
  if (cfg.gamma <= 0.0)
    throw Error(ErrorKind::gamma_not_positive, "gamma must be positive");
  if (cfg.methods.empty())
    throw Error(ErrorKind::config, "no methods requested");
  if (cfg.lambda2 < 0.0)
    throw Error(ErrorKind::validation, "lambda2 must be >= 0");
}

bool wants(const ExperimentConfig& cfg, Method m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

struct FoldFits {
  // One entry per requested method, aligned with cfg.methods.
  std::vector<Solution> solutions;
  std::vector<double> seconds;
};

FoldFits fit_fold(const CandidatePool& pool, const PredictionMatrix& pm,
                  const Eigen::VectorXd& y, const ExperimentConfig& cfg) {
  using clock = std::chrono::steady_clock;
  FoldFits fits;
  fits.solutions.resize(cfg.methods.size());
  fits.seconds.resize(cfg.methods.size(), 0.0);

  const int k = std::min(cfg.k, pool.size());

  // moss_h / moss_m share one descending sweep so cuts carry over.
  Solution sol_h, sol_m;
  double shared_seconds = 0.0;
  const bool want_h = wants(cfg, Method::moss_h);
  const bool want_m = wants(cfg, Method::moss_m);
  if (want_h || want_m) {
    const auto start = clock::now();
    const EpsilonSequence seq = epsilon_sequence(pool.pi, k);
    const double eps_h = seq.at_clamped(2);
    const double eps_m = seq.at_clamped(39);
    std::vector<double> eps_values;
    if (want_h) eps_values.push_back(eps_h);
    if (want_m && (!want_h || eps_m < eps_h)) eps_values.push_back(eps_m);
    ParetoOptions popt;
    popt.solver = cfg.solver;
    const ParetoFrontier frontier = compute_pareto(pool, pm, y, k, eps_values, popt);
    shared_seconds = std::chrono::duration<double>(clock::now() - start).count();
    for (const ParetoPoint& pt : frontier.points) {
      if (want_h && pt.epsilon == eps_h) sol_h = pt.solution;
      if (want_m && pt.epsilon == eps_m) sol_m = pt.solution;
    }
    if (want_h && want_m && eps_m >= eps_h) sol_m = sol_h;  // clamped together
    shared_seconds /= static_cast<double>((want_h ? 1 : 0) + (want_m ? 1 : 0));
  }

  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    const auto start = clock::now();
    switch (cfg.methods[i]) {
      case Method::topk:
        fits.solutions[i] = stability_select_topk(pool, pm, y, k);
        break;
      case Method::moss_h:
        fits.solutions[i] = sol_h;
        fits.seconds[i] = shared_seconds;
        continue;
      case Method::moss_m:
        fits.solutions[i] = sol_m;
        fits.seconds[i] = shared_seconds;
        continue;
      case Method::moss_l: {
        CdConfig base;
        fits.solutions[i] = fit_target_k(pool, pm, y, cfg.lambda2, k, base).solution;
        break;
      }
    }
    fits.seconds[i] = std::chrono::duration<double>(clock::now() - start).count();
  }
  return fits;
}

}  // namespace

ExperimentReport run_cv(const Dataset& data, const ExperimentConfig& cfg) {
  validate_experiment(data, cfg);
  const int n = static_cast<int>(data.n());
  const std::vector<std::vector<int>> folds = cv_folds(n, cfg.folds, cfg.seed);

  ExperimentReport report;
  report.folds = cfg.folds;
  report.k = cfg.k;
  report.gamma = cfg.gamma;
  report.seed = cfg.seed;
  report.metric = cfg.metric;
  report.methods.resize(cfg.methods.size());
  for (std::size_t i = 0; i < cfg.methods.size(); ++i)
    report.methods[i].method = cfg.methods[i];

  for (int f = 0; f < cfg.folds; ++f) {
    const std::vector<int>& test_rows = folds[static_cast<std::size_t>(f)];
    std::vector<int> train_rows;
    train_rows.reserve(static_cast<std::size_t>(n) - test_rows.size());
    {
      std::size_t t = 0;
      for (int row = 0; row < n; ++row) {
        if (t < test_rows.size() && test_rows[t] == row)
          ++t;
        else
          train_rows.push_back(row);
      }
    }
    try {
      const Dataset train = take_rows(data, train_rows);
      const Dataset test = take_rows(data, test_rows);

      ForestConfig fcfg = cfg.forest;
      fcfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(f));
      const CandidatePool pool = generate_rules(train, fcfg);
      const PredictionMatrix pm = build_prediction_matrix(pool, train, cfg.gamma);
      const Eigen::VectorXd y = centered_target(train, pm);

      const FoldFits fits = fit_fold(pool, pm, y, cfg);
      for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        const Solution& sol = fits.solutions[i];
        const ModelArtifact model =
            make_artifact(sol, pool, pm, train.feature_names,
                          method_name(cfg.methods[i]));
        const double r2 = r_squared(test.target, model_predict(model, test));
        MethodReport& mr = report.methods[i];
        mr.fold_r2.push_back(r2);
        mr.fold_rule_sets.push_back(rule_set_of(pool, sol.support));
        mr.fold_solutions.push_back(sol);
        mr.seconds += fits.seconds[i];
      }
      if (log_enabled(LogLevel::info))
        log_line(LogLevel::info, "cv fold " + std::to_string(f) + ": pool " +
                                     std::to_string(pool.size()) + " rules");
    } catch (const Error& e) {
      nlohmann::json details = e.details();
      details["fold"] = f;
      throw Error(e.kind(), "fold " + std::to_string(f) + ": " + e.what(), details);
    }
  }

  for (MethodReport& mr : report.methods) {
    const int t = static_cast<int>(mr.fold_r2.size());
    mr.mean_r2 =
        std::accumulate(mr.fold_r2.begin(), mr.fold_r2.end(), 0.0) / t;
    double ss = 0.0;
    for (double r2 : mr.fold_r2) ss += (r2 - mr.mean_r2) * (r2 - mr.mean_r2);
    mr.se_r2 = std::sqrt(ss / (t - 1)) / std::sqrt(static_cast<double>(t));
    mr.stability = empirical_stability(mr.fold_rule_sets, cfg.metric);
  }
  return report;
}

std::vector<ExperimentReport> run_sensitivity(const Dataset& data,
                                              const ExperimentConfig& cfg) {
  if (cfg.gamma_grid.empty() && cfg.k_grid.empty())
    throw Error(ErrorKind::config, "sensitivity mode needs a gamma or k grid");
  const std::vector<double> gammas =
      cfg.gamma_grid.empty() ? std::vector<double>{cfg.gamma} : cfg.gamma_grid;
  const std::vector<int> ks = cfg.k_grid.empty() ? std::vector<int>{cfg.k} : cfg.k_grid;

  std::vector<ExperimentReport> reports;
  reports.reserve(gammas.size() * ks.size());
  for (double gamma : gammas) {
    for (int k : ks) {
      ExperimentConfig point = cfg;
      point.gamma = gamma;
      point.k = k;
      point.gamma_grid.clear();
      point.k_grid.clear();
      reports.push_back(run_cv(data, point));
    }
  }
  return reports;
}

}  // namespace moss
