#pragma once

#include <safetrack/dynamics.hpp>
#include <safetrack/gains.hpp>
#include <safetrack/halfspace.hpp>
#include <safetrack/schedule.hpp>
#include <safetrack/world.hpp>

#include <functional>

namespace safetrack {

/// A disturbance-free rollout of the safety-filtered policy; the tracking
/// layer steers the perturbed system toward it.
struct SafeTargetTrajectory {
  TrajectorySchedule schedule;
  Scalar min_clearance = 0.0;  // smallest clearance along the target
};

/// Tracking filter for Lagrangian systems. Builds the composite error
/// s = (v - v_d) + Lambda_r (p - p_d), the reference velocity
/// v_r = v_d - Lambda_r (p - p_d), and the certified-feasible input
///   u_bar = M vdot_r + C v_r + G + D - k_r M s,
/// then projects the target input onto (u - u_bar)ᵀ s <= 0.
SafetyFilterOutput robust_filter(const Vector& u_target,
                                 const TrajectorySchedule::Point& target,
                                 const AgentState& state,
                                 const LagrangianPlant& plant,
                                 const RobustGains& gains);

/// General-system analogue: the composite error is weighted through Bᵀ M and
/// u_bar mirrors the metric form of the safety filter with the tracking gain
/// in place of the barrier term.
SafetyFilterOutput robust_filter_general(const Vector& u_target,
                                         const TrajectorySchedule::Point& target,
                                         const AgentState& state,
                                         const AffinePlant& plant,
                                         const RobustGains& gains,
                                         const Matrix& metric, Scalar t);

/// Uniform bounds of the plant entering the stochastic tracking analysis:
/// m_lower I <= M <= m_upper I, |M^{-1} Gamma|_F^2 <= d_s_bar,
/// |dM/dx_k| <= m_x_bar, |d2M/(dx_k dx_l)| <= m_x2_bar.
struct PlantBounds {
  Scalar m_lower = 1.0;
  Scalar m_upper = 1.0;
  Scalar d_s_bar = 0.0;
  Scalar m_x_bar = 0.0;
  Scalar m_x2_bar = 0.0;

  void validate() const;
};

/// Bounds for a constant-identity mass matrix and the given diffusion bound.
PlantBounds unit_mass_bounds(Scalar gamma_bar);

/// Samples the mass matrix over a position box and takes extrema with a
/// 1.2 safety factor; derivative bounds by finite differences.
PlantBounds estimate_plant_bounds(const LagrangianPlant& plant,
                                  const Vector& p_lo, const Vector& p_hi,
                                  Scalar gamma_bar, int n_samples,
                                  std::uint64_t seed);

/// Exponential envelope of the expected composite tracking error:
///   E|s(t)| <= a + b exp(-k_r_bar t),
/// plus the expected-deviation curve and probability floor derived from it.
struct ErrorEnvelope {
  Scalar a = 0.0;
  Scalar b = 0.0;
  Scalar k_r_bar = 0.0;
  Scalar C_d = 0.0;
  Scalar D_s = 0.0;               // chosen margin (set via margin_from_envelope)
  Scalar lambda_r_min = 1.0;      // smallest eigenvalue of Lambda_r
  Scalar initial_sq_error = 0.0;  // E|e_d(0)|^2 term of the deviation curve

  Scalar mean_bound(Scalar t) const;          // a + b exp(-k_r_bar t)
  Scalar expected_deviation(Scalar t) const;  // D_E(t)
  Scalar probability_floor(Scalar t) const;   // [1 - D_E(t)/D_s]^+
};

/// Builds the envelope constants from the gain condition
///   2 k_r_bar = k_r - m_lower^{-1}((d_bar + d_s_bar m_x_bar)/eps_d
///                                  + d_s_bar m_x2_bar / 2),
///   C_d = (d_s_bar m_upper + eps_d (d_bar + d_s_bar m_x_bar)) / m_lower.
/// initial_error seeds both the transient coefficient (through
/// E V_r(0) <= m_upper initial_error^2) and the deviation curve.
/// Throws GainError when no positive decay rate exists.
ErrorEnvelope error_envelope(const RobustGains& gains, const PlantBounds& bounds,
                             const DisturbanceSpec& disturbance,
                             Scalar initial_error, Index dim);

/// Smallest margin D_s with [1 - sup_{t<=horizon} D_E(t)/D_s]^+ >= probability.
Scalar margin_from_envelope(const ErrorEnvelope& envelope, Scalar target_probability,
                            Scalar horizon);

}  // namespace safetrack
