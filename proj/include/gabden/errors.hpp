#ifndef GABDEN_ERRORS_HPP
#define GABDEN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gabden {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input, unknown names, bad parameters. Maps to the CLI usage exit code.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A mathematical hypothesis or precondition is not met by the data
/// (degenerate lattice, duplicated points, nearly singular section).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical trouble: resolution, truncation, conditioning, inconsistency.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public NumericalError {
 public:
  GridMismatchError() : NumericalError("signals live on different time grids") {}
};

class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConditioningError : public NumericalError {
 public:
  ConditioningError(const std::string& what, double condition)
      : NumericalError(what + " (B/A = " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class InconsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gabden

#endif  // GABDEN_ERRORS_HPP
