#pragma once

#include <safetrack/types.hpp>

namespace safetrack {

/// Output of a minimal-deviation halfspace projection. `direction` is the
/// constraint normal the projection used (velocity error, its metric-weighted
/// image, or the composite error depending on the filter); `e_v` is the raw
/// velocity tracking error where the filter defines one.
struct SafetyFilterOutput {
  Vector u;
  Scalar constraint_value = 0.0;  // (u_in - u_bar)ᵀ direction before filtering
  bool active = false;
  Vector direction;
  Vector e_v;
  Vector u_bar;
};

/// Closed-form solution of  min ‖u − u_nominal‖²  s.t. (u − u_bar)ᵀ w ≤ 0:
/// subtract the along-w excess when the constraint value is positive,
/// pass through otherwise (including w = 0, where the constraint is vacuous).
SafetyFilterOutput project_input(const Vector& u_nominal, const Vector& u_bar,
                                 const Vector& w);

/// Same problem solved through the stationarity system
///   [2I  w; wᵀ 0] [u; λ] = [2 u_nominal; wᵀ u_bar]
/// with the multiplier sign check. Reference route for the closed form.
Vector qp_oracle_halfspace(const Vector& u_nominal, const Vector& u_bar,
                           const Vector& w);

}  // namespace safetrack
