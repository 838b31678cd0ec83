#ifndef CLUSTSIG_DATASET_HPP
#define CLUSTSIG_DATASET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace clustsig {

// Observations are rows, features are columns.
using DataMatrix = Eigen::MatrixXd;

// Gaussian mixture description for synthetic experiments. `delta` is the
// signal-strength knob the named experiment settings use when they build
// `means`; it is carried along so manifests can record it.
struct MixtureSpec {
  std::vector<Eigen::VectorXd> means;
  std::vector<int> sizes;
  double sigma = 1.0;
  double delta = 0.0;

  int total_n() const;
  void validate() const;
};

// Which mixture component generated each row (0-based).
struct TrueLabels {
  std::vector<int> labels;
};

enum class MisspecKind { t5, t10, noniso };

// Reads a numeric CSV (comma-separated, '.' decimal point, no missing
// values). Throws ParseError with the offending row/column, DimensionError
// if fewer than 3 rows result.
DataMatrix load_csv(const std::string& path, bool has_header);

// True when the first line of the file does not parse as numbers.
bool csv_has_header(const std::string& path);

// Writes with 17 significant digits so load_csv(write_csv(X)) == X.
void write_csv(const DataMatrix& x, const std::string& path);

// Center each column and scale to unit sample standard deviation (n-1
// denominator). Constant columns raise DegenerateDataError.
DataMatrix standardize(const DataMatrix& x);

// Row i is mean(component(i)) + sigma * N(0, I_q). Rows are laid out in
// block order following spec.sizes; draws are row-major so the output is a
// pure function of (spec, seed).
std::pair<DataMatrix, TrueLabels> gen_mixture(const MixtureSpec& spec,
                                              std::uint64_t seed);

// Heavy-tailed / non-isotropic null data for the misspecification studies.
DataMatrix gen_misspecified(MisspecKind kind, int n, int q, std::uint64_t seed);

}  // namespace clustsig

#endif
