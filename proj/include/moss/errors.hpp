// Error kinds shared across the library. Solver-side failures (infeasible
// constraint, exhausted iteration/node budgets) are distinguished from user
// mistakes so the CLI can map them to different exit codes.
#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace moss {

enum class ErrorKind {
  // user / input errors
  csv_parse,
  validation,
  dimension_mismatch,
  index_out_of_range,
  gamma_not_positive,
  empty_split_list,
  contradictory_splits,
  degenerate_data,
  empty_pool,
  empty_rule_set,
  too_few_sets,
  k_too_large,
  constant_target,
  config,
  io,
  // solver failures
  infeasible,
  iteration_limit,
  cholesky_failure,
  numerical,
};

// True for kinds that indicate the optimizer itself failed rather than the
// caller handing in bad input.
inline bool is_solver_failure(ErrorKind k) {
  switch (k) {
    case ErrorKind::infeasible:
    case ErrorKind::iteration_limit:
    case ErrorKind::cholesky_failure:
    case ErrorKind::numerical:
      return true;
    default:
      return false;
  }
}

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::csv_parse: return "csv_parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::index_out_of_range: return "index_out_of_range";
    case ErrorKind::gamma_not_positive: return "gamma_not_positive";
    case ErrorKind::empty_split_list: return "empty_split_list";
    case ErrorKind::contradictory_splits: return "contradictory_splits";
    case ErrorKind::degenerate_data: return "degenerate_data";
    case ErrorKind::empty_pool: return "empty_pool";
    case ErrorKind::empty_rule_set: return "empty_rule_set";
    case ErrorKind::too_few_sets: return "too_few_sets";
    case ErrorKind::k_too_large: return "k_too_large";
    case ErrorKind::constant_target: return "constant_target";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::iteration_limit: return "iteration_limit";
    case ErrorKind::cholesky_failure: return "cholesky_failure";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  Error(ErrorKind kind, const std::string& msg, nlohmann::json details)
      : std::runtime_error(msg), kind_(kind), details_(std::move(details)) {}

  ErrorKind kind() const { return kind_; }
  const nlohmann::json& details() const { return details_; }

 private:
  ErrorKind kind_;
  nlohmann::json details_;
};

}  // namespace moss
