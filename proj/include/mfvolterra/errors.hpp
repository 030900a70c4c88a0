#pragma once

#include <stdexcept>
#include <string>

namespace mfv {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature exhausted its subdivision budget before meeting tolerance.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Factorization, conditioning or other numerical breakdown.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Covariance factorization failed even after the maximal diagonal jitter.
class FactorizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A path value or level fell outside the supplied bins.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Not enough samples or scales for a statistical estimator to be meaningful.
class InsufficientSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mfv
