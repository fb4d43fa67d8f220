#pragma once

/**
 * @file errors.hpp
 * @brief Exception types raised by the Taylor engine, linear algebra and
 *        integrators. Solvers catch these and translate them to a status.
 */

#include <stdexcept>
#include <string>

namespace hosolve {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Division by (or reciprocal of) a bundle whose primal is below the floor.
struct ZeroPrimal : Error {
  using Error::Error;
};

/// Elementary function applied outside its domain (log/sqrt of x <= 0).
struct DomainError : Error {
  using Error::Error;
};

struct DegenerateStep : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

struct InnerSolveFailed : Error {
  using Error::Error;
};

struct StepSizeUnderflow : Error {
  using Error::Error;
};

struct ZeroReference : Error {
  using Error::Error;
};

}  // namespace hosolve
