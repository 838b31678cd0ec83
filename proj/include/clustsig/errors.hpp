#ifndef CLUSTSIG_ERRORS_HPP
#define CLUSTSIG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace clustsig {

// Bad flags, parameters, or requests (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file. Row/column are 0-based positions in the file body.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int row, int col)
      : std::runtime_error(msg), row(row), col(col) {}
  int row;
  int col;
};

// Input has the wrong shape for the requested operation.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too few points in the tested clusters (needs m >= 3).
struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Zero within- or between-cluster variation; directions undefined.
struct DegenerateDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Truncation set has no detectable probability mass.
struct EmptyTruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Monte Carlo estimator produced no usable draws.
struct EstimationFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generic numerical failure (non-convergence, underflow of a required mass).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace clustsig

#endif
