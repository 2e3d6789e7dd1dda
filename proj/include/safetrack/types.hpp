#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

// Default to double precision; override with -DSAFETRACK_SCALAR=float etc.
#ifndef SAFETRACK_SCALAR
#define SAFETRACK_SCALAR double
#endif

namespace safetrack {

using Scalar = SAFETRACK_SCALAR;
using Index = Eigen::Index;

using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <int Rows, int Cols>
using MatrixN = Eigen::Matrix<Scalar, Rows, Cols>;

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configuration or scenario field violates a documented invariant.
/// The message names the offending field.
struct ValidationError : Error {
  using Error::Error;
};

/// The log-barrier is undefined: some clearance is at or below zero.
struct NotSafeError : Error {
  using Error::Error;
};

/// No stabilizing Riccati solution at the queried state.
struct RiccatiError : Error {
  using Error::Error;
};

/// Robust gain too small to admit a positive decay rate.
struct GainError : Error {
  using Error::Error;
};

/// The reference planner ended with an unsafe or non-converged plan.
struct PlannerError : Error {
  using Error::Error;
};

/// The constraint set of a quadratic program is empty.
struct QpInfeasibleError : Error {
  using Error::Error;
};

/// A simulated state stopped being finite.
struct NonFiniteStateError : Error {
  using Error::Error;
};

}  // namespace safetrack
