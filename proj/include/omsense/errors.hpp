#pragma once

#include <stdexcept>
#include <string>

namespace omsense {

// Base class for recoverable toolkit errors. Plain precondition violations
// throw std::invalid_argument instead.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive integration exhausted its subdivision budget; carries the best
// estimate reached so the caller can still inspect it.
struct QuadratureError : Error {
  QuadratureError(const std::string& what, double best_value, double best_error)
      : Error(what), value(best_value), error_estimate(best_error) {}
  double value;
  double error_estimate;
};

// A response denominator vanished, or a principal-value pole is ill-posed
// (on a boundary, or with an unstable residue estimate).
struct SingularityError : Error {
  using Error::Error;
};

// The time-domain state grew beyond any physically meaningful bound.
struct DivergenceError : Error {
  using Error::Error;
};

// The measurement output carries no force signal (zero transduction).
struct NoTransductionError : Error {
  using Error::Error;
};

// The bath-induced shift pushes the squared effective frequency non-positive.
struct OverdampedShiftError : Error {
  using Error::Error;
};

// A run configuration was rejected; line is 1-based, or -1 when no source
// location applies.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what, long line_number = -1)
      : Error(what), line(line_number) {}
  long line;
};

}  // namespace omsense
