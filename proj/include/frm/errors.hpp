#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace frm {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched GroupSpace / array shapes.
struct ShapeError : Error {
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Bad input data: empty cells, malformed CSV, unknown labels.
struct DataError : Error {
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// Invalid or inconsistent configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Constrained problem has no feasible point. `certificate` is a separating
// functional c (flat cell array): every feasible candidate x satisfies
// <c, x> <= -margin while the constraint set lies in <c, x> = 0.
struct InfeasibleError : Error {
  std::vector<double> certificate;
  double margin = 0.0;
  InfeasibleError(const std::string& msg, std::vector<double> cert, double m)
      : Error(msg), certificate(std::move(cert)), margin(m) {}
};

// A documented precondition does not hold (e.g. the unbiased risk minimizer
// is not fair when a recovery check requires it).
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// A shipped fixture failed its load-time re-verification.
struct CheckFailure : Error {
  explicit CheckFailure(const std::string& msg) : Error(msg) {}
};

}  // namespace frm
