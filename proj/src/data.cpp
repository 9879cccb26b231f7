#include "moss/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "moss/errors.hpp"

namespace moss {

void validate(const Dataset& data) {
  if (data.n() < 2)
    throw Error(ErrorKind::validation, "dataset needs at least 2 rows, got " +
                                           std::to_string(data.n()));
  if (data.p() < 1)
    throw Error(ErrorKind::validation, "dataset needs at least 1 feature column");
  if (data.target.size() != data.n())
    throw Error(ErrorKind::validation,
                "target length " + std::to_string(data.target.size()) +
                    " does not match row count " + std::to_string(data.n()));
  if (!data.features.allFinite() || !data.target.allFinite())
    throw Error(ErrorKind::validation, "dataset contains non-finite values");
  if (!data.feature_names.empty() &&
      static_cast<Eigen::Index>(data.feature_names.size()) != data.p())
    throw Error(ErrorKind::validation, "feature name count does not match columns");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col,
                  const std::string& origin) {
  const std::string cell = trim(raw);
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorKind::csv_parse,
                 origin + ": row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": " + why + " ('" + cell + "')");
  };
  if (cell.empty()) throw fail("empty cell");
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw fail("not a decimal real");
  if (!std::isfinite(value)) throw fail("non-finite value");
  return value;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& target_column,
                  const std::string& origin) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  // Ignore trailing blank lines only.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorKind::csv_parse, origin + ": empty file");

  std::vector<std::string> header = split_fields(lines[0]);
  for (auto& h : header) h = trim(h);
  // An empty target name selects features-only mode (prediction inputs);
  // the target vector comes back all zero.
  int target_idx = -1;
  if (!target_column.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == target_column) target_idx = static_cast<int>(j);
    if (target_idx < 0)
      throw Error(ErrorKind::csv_parse,
                  origin + ": target column '" + target_column + "' not in header");
  }
  const std::size_t nfeatures = header.size() - (target_idx >= 0 ? 1 : 0);
  if (nfeatures < 1)
    throw Error(ErrorKind::csv_parse, origin + ": need at least one feature column");

  const std::size_t ncols = header.size();
  const std::size_t nrows = lines.size() - 1;
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(nrows),
                       static_cast<Eigen::Index>(nfeatures));
  data.target = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nrows));
  for (std::size_t j = 0; j < ncols; ++j)
    if (static_cast<int>(j) != target_idx) data.feature_names.push_back(header[j]);

  for (std::size_t i = 0; i < nrows; ++i) {
    const std::vector<std::string> fields = split_fields(lines[i + 1]);
    if (fields.size() != ncols)
      throw Error(ErrorKind::csv_parse,
                  origin + ": row " + std::to_string(i + 2) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(ncols));
    Eigen::Index fcol = 0;
    for (std::size_t j = 0; j < ncols; ++j) {
      const double v = parse_cell(fields[j], i + 2, j + 1, origin);
      if (static_cast<int>(j) == target_idx)
        data.target[static_cast<Eigen::Index>(i)] = v;
      else
        data.features(static_cast<Eigen::Index>(i), fcol++) = v;
    }
  }
  validate(data);
  return data;
}

Dataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), target_column, path);
}

Dataset take_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.p());
  out.target.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]);
    out.target[static_cast<Eigen::Index>(i)] = data.target[rows[i]];
  }
  return out;
}

}  // namespace moss
