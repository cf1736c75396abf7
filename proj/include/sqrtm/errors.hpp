#pragma once

#include <stdexcept>

namespace sqrtm {

// Base type for all failures raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// A pivot underflowed the LU threshold.
struct SingularMatrix : Error {
  using Error::Error;
};

// An iteration failed to reach its stopping tolerance.
struct NonConvergence : Error {
  using Error::Error;
};

// The Pade denominator polynomial touched zero on [0, 1].
struct PoleDetected : Error {
  using Error::Error;
};

// A sign/Lyapunov iteration blew up (typically a non-SPD input).
struct Diverged : Error {
  using Error::Error;
};

struct NonPositiveEigenvalue : Error {
  using Error::Error;
};

// Bad arguments or configuration.
struct ValidationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace sqrtm
