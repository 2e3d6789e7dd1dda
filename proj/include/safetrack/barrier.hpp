#pragma once

#include <safetrack/types.hpp>
#include <safetrack/world.hpp>

#include <functional>
#include <limits>
#include <vector>

namespace safetrack {

/// Below this clearance the log-barrier is treated as undefined and
/// NotSafeError is raised instead of returning a near-infinite value.
constexpr Scalar kClearanceFloor = 1e-9;

/// Pairwise clearance: 0 at the inflated safe radius, 1 at the sensing
/// radius, affine in the weighted distance in between. May be negative
/// (violation) or exceed 1 (outside sensing range).
Scalar clearance(const Vector& p_ij, const SafetyConfig& cfg);

/// Caller-supplied pairwise safety function for the generalized barrier:
/// value h(x_self, x_other) and its gradient with respect to self position.
struct PairwiseSafety {
  std::function<Scalar(const AgentState&, const AgentState&)> value;
  std::function<Vector(const AgentState&, const AgentState&)> grad_self_p;
};

/// The default clearance-based pairwise safety for a given geometry.
PairwiseSafety distance_pairwise_safety(const SafetyConfig& cfg);

struct ObjectClearance {
  bool is_obstacle = false;
  int index = -1;
  Scalar h = std::numeric_limits<Scalar>::infinity();
};

/// One agent's log-barrier value, its position gradient and the per-object
/// clearances it was built from.
struct BarrierEval {
  Scalar psi = 0.0;
  Vector grad_p;
  std::vector<ObjectClearance> h_values;
  Scalar min_h = std::numeric_limits<Scalar>::infinity();
};

/// psi = -sum log h over the observed objects, gradient by the chain rule.
/// Raises NotSafeError when any clearance is at or below kClearanceFloor.
BarrierEval eval_barrier(const Observation& obs, const SafetyConfig& cfg);

/// Generalized form with a caller-supplied pairwise safety function. The
/// default overload routes through this one, so results are bit-identical.
BarrierEval eval_barrier(const Observation& obs, const SafetyConfig& cfg,
                         const PairwiseSafety& pairwise);

/// Safe target velocity -k_p * grad psi.
Vector safe_velocity(const Observation& obs, const SafetyConfig& cfg, Scalar k_p);

/// Analytic time derivative of the safe target velocity along the flow,
/// given neighbor velocities aligned with obs.neighbor_agents (obstacles
/// are static). Only defined for the distance-based clearance.
Vector safe_velocity_rate(const Observation& obs,
                          const std::vector<Vector>& neighbor_velocities,
                          const SafetyConfig& cfg, Scalar k_p);

/// Convenience overload using the velocities stored in the observation.
Vector safe_velocity_rate(const Observation& obs, const SafetyConfig& cfg,
                          Scalar k_p);

/// Velocities stored in the observation's neighbor list.
std::vector<Vector> neighbor_velocities_of(const Observation& obs);

}  // namespace safetrack
