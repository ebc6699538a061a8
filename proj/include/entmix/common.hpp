#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace entmix {

using Complex = std::complex<double>;

/// Absolute tolerance for polytope and group identities.
inline constexpr double kTol = 1e-9;

// Thrown when the fields of an object disagree on dimensions.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation's precondition does not hold for the supplied input.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The request exceeds a hard-coded enumeration or search bound.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// The input is too badly scaled for a trustworthy verdict.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The operation is not defined for this kind of system.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace entmix
