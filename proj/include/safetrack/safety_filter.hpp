#pragma once

#include <safetrack/barrier.hpp>
#include <safetrack/dynamics.hpp>
#include <safetrack/gains.hpp>
#include <safetrack/halfspace.hpp>

#include <vector>

namespace safetrack {

/// Certified-feasible input for the Lagrangian filter constraint:
///   u_bar = M vdot_d + C v_d + G + D + v_d − k_v M e_v        (revised form)
/// with the draft form writing −k_p grad psi for the v_d term; both agree
/// when v_d is the gradient rule. Raises NotSafeError through the barrier.
Vector u_bar_lagrangian(const LagrangianPlant& plant, const Observation& obs,
                        const std::vector<Vector>& neighbor_velocities,
                        const SafetyConfig& cfg, const FilterGains& gains);

/// Minimal-deviation safety filter for Lagrangian systems: projects the
/// nominal input onto (u − u_bar)ᵀ e_v ≤ 0 in closed form.
SafetyFilterOutput safety_filter_lagrangian(const Vector& u_nominal,
                                            const LagrangianPlant& plant,
                                            const Observation& obs,
                                            const std::vector<Vector>& neighbor_velocities,
                                            const SafetyConfig& cfg,
                                            const FilterGains& gains);

/// Per-agent quantities of the general-system filter at one state.
struct GeneralFilterContext {
  Vector v_d;
  Vector v_d_dot;
  Vector e_v;      // v − v_d
  Vector e_v_bar;  // Bᵀ M e_v
  Vector f_d;      // drift at (p, v_d, t)
  Matrix M;
  Vector u_bar;
  Vector grad_psi;
};

GeneralFilterContext general_filter_context(const AffinePlant& plant,
                                            const Observation& obs,
                                            const std::vector<Vector>& neighbor_velocities,
                                            const SafetyConfig& cfg,
                                            const FilterGains& gains,
                                            const Matrix& metric);

/// u_bar for general control-affine systems:
///   e_v_bar (e_vᵀ M (vdot_d − f_d) − k_p e_vᵀ grad psi) / ‖e_v_bar‖²,
/// zero when e_v_bar vanishes.
Vector u_bar_general(const AffinePlant& plant, const Observation& obs,
                     const std::vector<Vector>& neighbor_velocities,
                     const SafetyConfig& cfg, const FilterGains& gains,
                     const Matrix& metric);

/// The same projection as the Lagrangian filter with e_v_bar as the
/// constraint direction.
SafetyFilterOutput safety_filter_general(const Vector& u_nominal,
                                         const AffinePlant& plant,
                                         const Observation& obs,
                                         const std::vector<Vector>& neighbor_velocities,
                                         const SafetyConfig& cfg,
                                         const FilterGains& gains,
                                         const Matrix& metric);

/// Numerical full-actuation check: B Bᵈᵃᵍ = I within tol.
bool is_fully_actuated(const Matrix& B, Scalar tol = 1e-9);

}  // namespace safetrack
