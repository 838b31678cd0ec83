#include "clustsig/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "clustsig/errors.hpp"
#include "clustsig/rng.hpp"

namespace clustsig {

namespace {

bool parse_cell(std::string_view cell, double* out) {
  // from_chars demands the whole trimmed cell parse as one number
  size_t b = cell.find_first_not_of(" \t");
  size_t e = cell.find_last_not_of(" \t\r");
  if (b == std::string_view::npos) return false;
  cell = cell.substr(b, e - b + 1);
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto res = std::from_chars(first, last, *out);
  return res.ec == std::errc{} && res.ptr == last && std::isfinite(*out);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) cells.push_back(cur);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

int MixtureSpec::total_n() const {
  int n = 0;
  for (int s : sizes) n += s;
  return n;
}

void MixtureSpec::validate() const {
  if (means.empty() || means.size() != sizes.size()) {
    throw ConfigError("mixture spec: means and sizes must align and be nonempty");
  }
  Eigen::Index q = means.front().size();
  for (const auto& mu : means) {
    if (mu.size() != q) throw ConfigError("mixture spec: inconsistent mean dimensions");
  }
  for (int s : sizes) {
    if (s <= 0) throw ConfigError("mixture spec: component sizes must be positive");
  }
  if (!(sigma >= 0.0)) throw ConfigError("mixture spec: sigma must be nonnegative");
}

bool csv_has_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path, 0, 0);
  double v;
  for (const auto& cell : split_row(line)) {
    if (!parse_cell(cell, &v)) return true;
  }
  return false;
}

DataMatrix load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  int file_row = 0;
  size_t ncol = 0;
  bool skipped_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      ++file_row;
      continue;
    }
    if (has_header && !skipped_header) {
      skipped_header = true;
      ++file_row;
      continue;
    }
    auto cells = split_row(line);
    if (rows.empty()) {
      ncol = cells.size();
    } else if (cells.size() != ncol) {
      throw ParseError("row has " + std::to_string(cells.size()) +
                           " columns, expected " + std::to_string(ncol),
                       file_row, 0);
    }
    std::vector<double> vals(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) {
      if (!parse_cell(cells[c], &vals[c])) {
        throw ParseError("cell is not a finite number: '" + cells[c] + "'",
                         file_row, static_cast<int>(c));
      }
    }
    rows.push_back(std::move(vals));
    ++file_row;
  }
  if (rows.size() < 3) {
    throw DimensionError("need at least 3 data rows, got " +
                         std::to_string(rows.size()));
  }
  DataMatrix x(rows.size(), ncol);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < ncol; ++j) x(i, j) = rows[i][j];
  }
  return x;
}

void write_csv(const DataMatrix& x, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
      out << buf;
      if (j + 1 < x.cols()) out << ',';
    }
    out << '\n';
  }
}

DataMatrix standardize(const DataMatrix& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw DimensionError("standardize needs at least 2 rows");
  DataMatrix out(n, x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double mean = x.col(j).mean();
    double ss = (x.col(j).array() - mean).square().sum();
    double sd = std::sqrt(ss / (n - 1));
    if (sd <= 1e-13 * std::max(1.0, std::fabs(mean))) {
      throw DegenerateDataError("column " + std::to_string(j) +
                                " has zero sample variance");
    }
    out.col(j) = (x.col(j).array() - mean) / sd;
  }
  return out;
}

std::pair<DataMatrix, TrueLabels> gen_mixture(const MixtureSpec& spec,
                                              std::uint64_t seed) {
  spec.validate();
  const int n = spec.total_n();
  const Eigen::Index q = spec.means.front().size();
  DataMatrix x(n, q);
  TrueLabels labels;
  labels.labels.resize(n);
  Rng rng(seed);
  int row = 0;
  for (size_t c = 0; c < spec.sizes.size(); ++c) {
    for (int i = 0; i < spec.sizes[c]; ++i, ++row) {
      labels.labels[row] = static_cast<int>(c);
      for (Eigen::Index j = 0; j < q; ++j) {
        x(row, j) = spec.means[c](j) + spec.sigma * rng.normal();
      }
    }
  }
  return {std::move(x), std::move(labels)};
}

DataMatrix gen_misspecified(MisspecKind kind, int n, int q, std::uint64_t seed) {
  if (n < 1 || q < 1) throw ConfigError("gen_misspecified: n and q must be positive");
  Rng rng(seed);
  DataMatrix x(n, q);
  switch (kind) {
    case MisspecKind::t5:
    case MisspecKind::t10: {
      int dof = kind == MisspecKind::t5 ? 5 : 10;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < q; ++j) x(i, j) = rng.student_t(dof);
      return x;
    }
    case MisspecKind::noniso: {
      if (q != 2) throw ConfigError("noniso misspecification requires q = 2");
      for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = std::sqrt(2.0) * rng.normal();
      }
      return x;
    }
  }
  throw ConfigError("unknown misspecification kind");
}

}  // namespace clustsig
