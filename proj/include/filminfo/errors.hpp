#pragma once

#include <stdexcept>
#include <string>

namespace filminfo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter or argument (negative length, mismatched dimension, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Solver failure: non-convergence, rank deficiency, eigen-solver breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A covariance matrix violates the uncertainty bound nu >= 1/2.
class UnphysicalCovariance : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace filminfo
