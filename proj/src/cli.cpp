#include "moss/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "moss/cd.hpp"
#include "moss/data.hpp"
#include "moss/errors.hpp"
#include "moss/evaluation.hpp"
#include "moss/forest.hpp"
#include "moss/model.hpp"
#include "moss/parallel.hpp"
#include "moss/serialization.hpp"
#include "moss/solver.hpp"
#include "moss/stability.hpp"

namespace moss {

namespace {

void add_forest_flags(CLI::App* cmd, ForestConfig* cfg) {
  cmd->add_option("--trees", cfg->trees, "bootstrap trees grown")->capture_default_str();
  cmd->add_option("--depth", cfg->max_depth, "maximum rule depth, 1-3")
      ->capture_default_str();
  cmd->add_option("--mtry", cfg->mtry, "features tried per split, 0 = ceil(p/3)")
      ->capture_default_str();
  cmd->add_option("--min-leaf", cfg->min_leaf, "minimum rows per child")
      ->capture_default_str();
  cmd->add_option("--quantiles", cfg->quantiles, "split-threshold quantiles per feature")
      ->capture_default_str();
  cmd->add_option("--max-rules", cfg->max_rules, "pool size cap")->capture_default_str();
  cmd->add_option("--noise-sigma", cfg->response_noise_sigma,
                  "target noise, as a multiple of sd(y)")
      ->capture_default_str();
  cmd->add_flag("--leaves-only", cfg->leaves_only, "extract leaf paths only");
}

void emit(const std::string& out_path, const std::string& text, std::ostream& out) {
  if (out_path.empty())
    out << text;
  else
    write_text_file(out_path, text);
}

void emit_json(const std::string& out_path, const nlohmann::json& j, std::ostream& out) {
  if (out_path.empty())
    out << j.dump(2) << "\n";
  else
    write_json_file(out_path, j);
}

// Pool plus the matching design matrix, shared by pareto/fit.
struct Workbench {
  Dataset data;
  CandidatePool pool;
  PredictionMatrix pm;
  Eigen::VectorXd y;
};

Workbench make_workbench(const std::string& data_path, const std::string& target,
                         const std::string& pool_path, const ForestConfig& fcfg,
                         double gamma) {
  Workbench w;
  w.data = load_csv(data_path, target);
  w.pool = pool_path.empty() ? generate_rules(w.data, fcfg)
                             : pool_from_json(read_json_file(pool_path));
  w.pm = build_prediction_matrix(w.pool, w.data, gamma);
  w.y = centered_target(w.data, w.pm);
  return w;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sparse, stable decision-rule regression"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file with per-subcommand sections");

  // Shared knobs. Each subcommand binds the subset it understands.
  std::string data_path, target, out_path, pool_path, model_path, csv_path;
  std::uint64_t seed = 0;
  int k = 15;
  double gamma = 1e-3;
  int threads = 0;
  ForestConfig fcfg;
  const auto add_threads_flag = [&threads](CLI::App* cmd) {
    cmd->add_option("--threads", threads, "worker cap, 0 = all cores")
        ->capture_default_str();
  };

  CLI::App* rules = app.add_subcommand("rules", "grow a forest and distill a rule pool");
  rules->add_option("--data", data_path, "training CSV")->required();
  rules->add_option("--target", target, "target column name")->required();
  add_forest_flags(rules, &fcfg);
  rules->add_option("--seed", seed, "RNG seed")->capture_default_str();
  add_threads_flag(rules);
  rules->add_option("--out", out_path, "pool JSON path (default: stdout)");

  CLI::App* pareto = app.add_subcommand("pareto", "sweep the stability/accuracy frontier");
  pareto->add_option("--data", data_path, "training CSV")->required();
  pareto->add_option("--target", target, "target column name")->required();
  pareto->add_option("--pool", pool_path, "reuse a saved pool instead of regrowing");
  add_forest_flags(pareto, &fcfg);
  pareto->add_option("--k", k, "rule budget")->capture_default_str();
  pareto->add_option("--gamma", gamma, "ridge level")->capture_default_str();
  int eps_count = 50;
  std::vector<int> eps_indices;
  pareto->add_option("--eps-count", eps_count, "bounds solved, 0 = whole ladder")
      ->capture_default_str();
  pareto->add_option("--eps-indices", eps_indices,
                     "explicit ladder ranks (overrides --eps-count)")
      ->delimiter(',');
  bool cold = false;
  pareto->add_flag("--cold-start", cold, "drop cuts between bounds (verification mode)");
  pareto->add_option("--seed", seed, "RNG seed")->capture_default_str();
  add_threads_flag(pareto);
  pareto->add_option("--out", out_path, "frontier JSON path (default: stdout)");
  pareto->add_option("--csv", csv_path, "also write epsilon,h1,h2,support_size rows");

  CLI::App* fit = app.add_subcommand("fit", "fit one rule-set model");
  fit->add_option("--data", data_path, "training CSV")->required();
  fit->add_option("--target", target, "target column name")->required();
  fit->add_option("--pool", pool_path, "reuse a saved pool instead of regrowing");
  add_forest_flags(fit, &fcfg);
  fit->add_option("--k", k, "rule budget")->capture_default_str();
  fit->add_option("--gamma", gamma, "ridge level")->capture_default_str();
  std::string method = "exact";
  fit->add_option("--method", method, "exact | cd")
      ->check(CLI::IsMember({"exact", "cd"}))
      ->capture_default_str();
  double epsilon = -1.0;
  int eps_index = 2;
  double lambda2 = 0.0;
  fit->add_option("--epsilon", epsilon, "stability bound (exact method)");
  fit->add_option("--eps-index", eps_index,
                  "ladder rank used when --epsilon is absent")
      ->capture_default_str();
  fit->add_option("--lambda2", lambda2, "stability reward (cd method)")
      ->capture_default_str();
  fit->add_option("--seed", seed, "RNG seed")->capture_default_str();
  add_threads_flag(fit);
  fit->add_option("--out", out_path, "model JSON path (default: stdout)");

  CLI::App* cv = app.add_subcommand("cv", "cross-validated method comparison");
  cv->add_option("--data", data_path, "dataset CSV")->required();
  cv->add_option("--target", target, "target column name")->required();
  add_forest_flags(cv, &fcfg);
  ExperimentConfig ecfg;
  std::vector<std::string> method_names = {"topk", "moss_h", "moss_m", "moss_l"};
  std::string metric_name = "dsc";
  std::string rulesets_dir;
  cv->add_option("--folds", ecfg.folds, "cross-validation folds")->capture_default_str();
  cv->add_option("--k", k, "rule budget")->capture_default_str();
  cv->add_option("--gamma", gamma, "ridge level")->capture_default_str();
  cv->add_option("--methods", method_names, "subset of topk,moss_h,moss_m,moss_l")
      ->delimiter(',');
  cv->add_option("--metric", metric_name, "dsc | jaccard | ochiai | pog")
      ->capture_default_str();
  cv->add_option("--lambda2", ecfg.lambda2, "stability reward for moss_l")
      ->capture_default_str();
  cv->add_option("--gamma-grid", ecfg.gamma_grid, "sensitivity sweep over gamma")
      ->delimiter(',');
  cv->add_option("--k-grid", ecfg.k_grid, "sensitivity sweep over k")->delimiter(',');
  cv->add_option("--seed", seed, "RNG seed")->capture_default_str();
  add_threads_flag(cv);
  cv->add_option("--out", out_path, "report JSON path (default: stdout)");
  cv->add_option("--emit-csv", csv_path, "also write per-method summary rows");
  cv->add_option("--rulesets-dir", rulesets_dir,
                 "write each fold's selected rule set as a standalone JSON file");

  CLI::App* stability = app.add_subcommand("stability", "compare saved rule sets");
  std::vector<std::string> set_paths;
  stability->add_option("--metric", metric_name, "dsc | jaccard | ochiai | pog")
      ->capture_default_str();
  stability->add_option("sets", set_paths, "two or more rule-set JSON files")
      ->required()
      ->expected(-2);

  CLI::App* predict = app.add_subcommand("predict", "apply a saved model to new rows");
  predict->add_option("--model", model_path, "model JSON from fit")->required();
  predict->add_option("--data", data_path, "feature CSV (extra columns ignored)")
      ->required();
  predict->add_option("--out", out_path, "prediction CSV path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    set_max_threads(threads);

    if (*rules) {
      fcfg.seed = seed;
      const Dataset data = load_csv(data_path, target);
      const CandidatePool pool = generate_rules(data, fcfg);
      emit_json(out_path, pool_to_json(pool), out);
      return 0;
    }

    if (*pareto) {
      fcfg.seed = seed;
      const Workbench w = make_workbench(data_path, target, pool_path, fcfg, gamma);
      const EpsilonSequence seq = epsilon_sequence(w.pool.pi, k);
      std::vector<double> eps_values;
      if (!eps_indices.empty()) {
        std::vector<int> ranks = eps_indices;
        std::sort(ranks.begin(), ranks.end());
        ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
        for (int r : ranks) {
          if (r < 0 || r >= seq.size())
            throw Error(ErrorKind::validation,
                        "ladder rank " + std::to_string(r) + " outside [0, " +
                            std::to_string(seq.size()) + ")");
          eps_values.push_back(seq.values[static_cast<std::size_t>(r)]);
        }
      } else {
        const int count = eps_count <= 0 ? seq.size() : std::min(eps_count, seq.size());
        eps_values.assign(seq.values.begin(), seq.values.begin() + count);
      }
      ParetoOptions popt;
      popt.reuse_cuts = !cold;
      const ParetoFrontier frontier = compute_pareto(w.pool, w.pm, w.y, k, eps_values, popt);
      if (!csv_path.empty()) write_text_file(csv_path, frontier_to_csv(frontier));
      emit_json(out_path, frontier_to_json(frontier), out);
      return 0;
    }

    if (*fit) {
      fcfg.seed = seed;
      const Workbench w = make_workbench(data_path, target, pool_path, fcfg, gamma);
      Solution sol;
      if (method == "exact") {
        const EpsilonSequence seq = epsilon_sequence(w.pool.pi, k);
        const double eps = fit->count("--epsilon") ? epsilon : seq.at_clamped(eps_index);
        CutStore cuts;
        sol = solve_fixed_epsilon(w.pool, w.pm, w.y, k, eps, cuts,
                                  stability_select_topk(w.pool, w.pm, w.y, k).support);
      } else {
        sol = fit_target_k(w.pool, w.pm, w.y, lambda2, k).solution;
      }
      const ModelArtifact model =
          make_artifact(sol, w.pool, w.pm, w.data.feature_names, method);
      emit_json(out_path, model_to_json(model), out);
      return 0;
    }

    if (*cv) {
      const Dataset data = load_csv(data_path, target);
      ecfg.k = k;
      ecfg.gamma = gamma;
      ecfg.seed = seed;
      ecfg.forest = fcfg;
      ecfg.metric = parse_stability_metric(metric_name);
      ecfg.methods.clear();
      for (const std::string& name : method_names)
        ecfg.methods.push_back(parse_method(name));

      std::vector<ExperimentReport> reports;
      if (ecfg.gamma_grid.empty() && ecfg.k_grid.empty())
        reports.push_back(run_cv(data, ecfg));
      else
        reports = run_sensitivity(data, ecfg);

      if (!rulesets_dir.empty()) {
        std::filesystem::create_directories(rulesets_dir);
        for (const ExperimentReport& report : reports)
          for (const MethodReport& mr : report.methods)
            for (std::size_t f = 0; f < mr.fold_rule_sets.size(); ++f) {
              std::ostringstream name;
              name << method_name(mr.method) << "_g" << report.gamma << "_k"
                   << report.k << "_fold" << f << ".json";
              write_json_file((std::filesystem::path(rulesets_dir) / name.str()).string(),
                              rule_set_to_json(mr.fold_rule_sets[f]));
            }
      }
      if (!csv_path.empty()) {
        std::string csv;
        for (std::size_t i = 0; i < reports.size(); ++i) {
          std::string rows = report_to_csv(reports[i]);
          if (i > 0) rows.erase(0, rows.find('\n') + 1);  // keep one header
          csv += rows;
        }
        write_text_file(csv_path, csv);
      }
      if (reports.size() == 1)
        emit_json(out_path, report_to_json(reports[0]), out);
      else {
        nlohmann::json arr = nlohmann::json::array();
        for (const ExperimentReport& report : reports)
          arr.push_back(report_to_json(report));
        emit_json(out_path, arr, out);
      }
      return 0;
    }

    if (*stability) {
      const StabilityMetric metric = parse_stability_metric(metric_name);
      std::vector<RuleSet> sets;
      for (const std::string& path : set_paths)
        sets.push_back(rule_set_from_json(read_json_file(path)));
      const double value = empirical_stability(sets, metric);
      const Eigen::MatrixXd matrix = pairwise_matrix(sets, metric);
      out << nlohmann::json(value).dump() << "\n";
      for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
          out << (j ? "," : "") << nlohmann::json(matrix(i, j)).dump();
        out << "\n";
      }
      return 0;
    }

    if (*predict) {
      const ModelArtifact model = model_from_json(read_json_file(model_path));
      const Dataset data = load_csv(data_path, "");
      const Eigen::VectorXd yhat = model_predict(model, data);
      std::ostringstream csv;
      csv << "prediction\n";
      for (Eigen::Index i = 0; i < yhat.size(); ++i)
        csv << nlohmann::json(yhat[i]).dump() << "\n";
      emit(out_path, csv.str(), out);
      return 0;
    }

    err << "error: no subcommand selected\n";
    return 1;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    if (is_solver_failure(e.kind())) {
      nlohmann::json j{{"error", error_kind_name(e.kind())}, {"message", e.what()}};
      if (!e.details().is_null()) j["details"] = e.details();
      err << j.dump() << "\n";
      return 2;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace moss
