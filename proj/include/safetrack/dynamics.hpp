#pragma once

#include <safetrack/types.hpp>
#include <safetrack/world.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace safetrack {

/// Lagrangian system M(p) dv + (C(p,v) v + G(p) + D(p,v)) dt = u dt,
/// with M symmetric positive definite and Mdot - 2C skew-symmetric.
struct LagrangianPlant {
  Index dim = 0;
  std::function<Matrix(const Vector&)> mass;
  std::function<Matrix(const Vector&, const Vector&)> coriolis;
  std::function<Vector(const Vector&)> gravity;
  std::function<Vector(const Vector&, const Vector&)> damping;

  /// M^{-1} (u - C v - G - D).
  Vector acceleration(const Vector& p, const Vector& v, const Vector& u) const;
};

/// Control-affine second-order system dv = (f(p,v,t) + B(p,v,t) u) dt.
struct AffinePlant {
  Index dim_state = 0;  // n
  Index dim_input = 0;  // m
  std::function<Vector(const Vector&, const Vector&, Scalar)> drift;
  std::function<Matrix(const Vector&, const Vector&, Scalar)> actuation;
  /// Analytic velocity Jacobian of the drift; required by sdc_factorize.
  std::function<Matrix(const Vector&, const Vector&, Scalar)> drift_jacobian_v;

  Vector acceleration(const Vector& p, const Vector& v, const Vector& u,
                      Scalar t) const;
};

/// Affine view of a Lagrangian plant: f = -M^{-1}(C v + G + D), B = M^{-1}.
/// The velocity Jacobian falls back to central differences of f.
AffinePlant to_affine(const LagrangianPlant& plant);

/// Two-state benchmark plant with a non-polynomial drift; fully actuated by
/// default, single-channel actuation behind the flag.
AffinePlant make_nonlinear_example_plant(bool underactuated = false);

/// Planar thruster vehicle (x, y, heading) with unit mass and inertia;
/// a normalized double-integrator surrogate for the hardware testbed.
AffinePlant make_spacecraft_planar_plant();

/// Hill-Clohessy-Wiltshire relative orbital dynamics in Lagrangian form:
/// M = I, C the 2*mean_motion in-plane coupling (skew), G the tidal terms.
LagrangianPlant make_leo_hcw_plant(Scalar mean_motion);

/// Point mass: M = I, C = G = D = 0.
LagrangianPlant make_unit_mass_plant(Index n);

/// A plant under either description; Lagrangian plants carry their affine
/// view alongside so both filter families can run on them.
struct Plant {
  std::string key;
  std::optional<LagrangianPlant> lagrangian;
  AffinePlant affine;

  bool is_lagrangian() const { return lagrangian.has_value(); }
  Index n() const { return affine.dim_state; }
  Index m() const { return affine.dim_input; }
};

struct PlantParams {
  Scalar mean_motion = 1e-3;
  bool underactuated = false;
  Index dim = 2;
};

/// Keys: "nonlinear_example", "spacecraft_planar", "leo_hcw", "unit_mass".
Plant make_plant(const std::string& key, const PlantParams& params = {});

/// SDC matrix A with A (v - v_ref) = f(p,v,t) - f(p,v_ref,t) exactly,
/// built as the mean-value integral of the velocity Jacobian evaluated by
/// 8-point Gauss-Legendre quadrature.
Matrix sdc_factorize(const AffinePlant& plant, const Vector& p, const Vector& v,
                     const Vector& v_ref, Scalar t);

/// Bounds and shape of the exogenous disturbance.
struct DisturbanceSpec {
  enum class Profile { kConstantDirection, kSinusoidal, kWorstCaseRadial };

  Scalar d_bar = 0.0;
  Scalar gamma_bar = 0.0;
  Profile profile = Profile::kConstantDirection;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic disturbance on one agent at time t; norm bounded by d_bar.
/// The radial profile pushes toward the nearest object in the world.
Vector disturbance_value(const DisturbanceSpec& spec, const World& world,
                         int agent, Scalar t);

/// Constant diffusion (gamma_bar / sqrt(n)) * I so the Frobenius norm
/// meets the declared bound exactly.
Matrix diffusion_matrix(const DisturbanceSpec& spec, Index n);

}  // namespace safetrack
