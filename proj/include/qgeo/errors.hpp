#pragma once

#include <stdexcept>
#include <string>

namespace qgeo {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration / input parsing problems (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical-domain problems (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Radicand of sqrt(P) negative beyond tolerance: unphysical canonical point.
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Chart singularity: sin(beta) below guard, perfect correlation, etc.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Single-mode uncertainty product below hbar^2/4.
class UncertaintyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Covariance matrix fails Robertson-Schroedinger positivity.
class NonPhysicalError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Degenerate input (zero determinant where a positive one is required).
class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Matrix inversion failed.
class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Mass-shell discriminant negative: no real root for p_t.
class NoRootError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Adaptive integrator exceeded its rejection budget.
class StepFailureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Event at or inside the horizon radius.
class HorizonError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Proper-time radicand negative at a sample.
class ImaginaryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qgeo
