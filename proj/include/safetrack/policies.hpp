#pragma once

#include <safetrack/active_set_qp.hpp>
#include <safetrack/dynamics.hpp>
#include <safetrack/schedule.hpp>
#include <safetrack/world.hpp>

#include <cstdint>

namespace safetrack {

enum class PolicyKind {
  kGlobalReference,  // open-loop planned input
  kLearned,          // emulated policy alone
  kSafetyFilter,     // safety projection of the emulated policy each tick
  kRobustTracking,   // tracking filter over a safety-filtered rollout
  kClfCbfQp,         // baseline QP around the emulated policy
};

struct QpParams {
  Scalar alpha_h = 1.0;
  Scalar alpha_v = 1.0;
  Scalar rho_weight = 1e3;
  Scalar input_box_limit = 1.0;
  Scalar mu = 1.0;  // composite-clearance blend for the relative-degree-2 rows
  Scalar w_p = 1.0;
  Scalar w_v = 1.0;

  void validate() const;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::kLearned;
  Scalar error_magnitude = 0.0;
  Scalar track_kp = 1.0;
  Scalar track_kd = 2.0;
  QpParams qp;

  void validate() const;
};

/// Stand-in for a trained planner: reference feedforward plus local
/// feedback toward the schedule, perturbed by a smooth seeded signal whose
/// sup-norm never exceeds error_magnitude. Past the schedule end the goal
/// state is held with zero feedforward.
Vector emulated_policy(const Observation& obs, const TrajectorySchedule& reference,
                       int agent, const PolicySpec& spec, std::uint64_t seed);

struct ClfCbfResult {
  Vector u;
  Scalar rho = 0.0;
  bool infeasible = false;
};

/// Baseline controller: minimize ‖u − u_learned‖² + rho_weight rho² subject
/// to one composite clearance row per in-range object, a relaxed tracking
/// row toward the learned trajectory, box bounds and rho >= 0. On an empty
/// constraint set the result is flagged infeasible and u falls back to the
/// box-clamped learned input.
ClfCbfResult clf_cbf_policy(const Observation& obs, const Plant& plant,
                            const TrajectorySchedule& learned_reference, int agent,
                            const Vector& u_learned, const QpParams& params,
                            const SafetyConfig& cfg);

}  // namespace safetrack
