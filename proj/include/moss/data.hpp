// Tabular regression data and CSV ingestion.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace moss {

struct Dataset {
  Eigen::MatrixXd features;  // n x p
  Eigen::VectorXd target;    // n
  std::vector<std::string> feature_names;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index p() const { return features.cols(); }
};

// Throws Error(validation) unless n >= 2, p >= 1, all values finite and the
// target length matches the feature rows.
void validate(const Dataset& data);

// Strict CSV reader: header row, comma separated, every cell a finite decimal
// real. The named target column becomes `target`, everything else keeps its
// column order in `features`. An empty target name reads every column as a
// feature and zero-fills `target` (prediction inputs). Parse failures abort
// with 1-based row/column diagnostics.
Dataset load_csv(const std::string& path, const std::string& target_column);
Dataset parse_csv(const std::string& text, const std::string& target_column,
                  const std::string& origin);

// Row subset in the given order.
Dataset take_rows(const Dataset& data, const std::vector<int>& rows);

}  // namespace moss
