#ifndef HANKELPGD_ERRORS_HPP
#define HANKELPGD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hankelpgd {

/// Base class of all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched vector/matrix dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration (shape, grid, CLI arguments).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Observed data cannot seed the solver (e.g. every sampled entry is zero).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling could not satisfy the requested frequency separation.
class SeparationError : public Error {
 public:
  using Error::Error;
};

/// Metric undefined for the given input (e.g. zero reference signal).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Partial SVD failed to reach the requested tolerance; carries the last
/// residual estimate for diagnostics.
class SvdConvergenceError : public Error {
 public:
  SvdConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

}  // namespace hankelpgd

#endif  // HANKELPGD_ERRORS_HPP
