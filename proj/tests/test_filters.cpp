#include <doctest.h>

#include <safetrack/barrier.hpp>
#include <safetrack/contraction.hpp>
#include <safetrack/rng.hpp>
#include <safetrack/safety_filter.hpp>

#include <cmath>

using namespace safetrack;

namespace {

Vector vec2(Scalar x, Scalar y) {
  Vector v(2);
  v << x, y;
  return v;
}

Vector vec3(Scalar x, Scalar y, Scalar z) {
  Vector v(3);
  v << x, y, z;
  return v;
}

SafetyConfig cfg_default() {
  SafetyConfig cfg;
  cfg.r_s = 0.5;
  cfg.delta_r_s = 0.1;
  cfg.r_sen = 2.0;
  return cfg;
}

Observation lone_agent(const Vector& v) {
  Observation obs;
  obs.self = AgentState(Vector::Zero(v.size()), v);
  obs.self_index = 0;
  return obs;
}

}  // namespace

TEST_CASE("u_bar for a free point mass") {
  const LagrangianPlant plant = make_unit_mass_plant(2);
  FilterGains gains;
  gains.k_p = 1.0;
  gains.k_v = 0.8;
  // At rest with nothing around every term vanishes.
  CHECK(u_bar_lagrangian(plant, lone_agent(vec2(0, 0)), {}, cfg_default(), gains).norm() ==
        0.0);
  // Moving: only the damping term survives.
  const Vector u_bar =
      u_bar_lagrangian(plant, lone_agent(vec2(1.0, -2.0)), {}, cfg_default(), gains);
  CHECK(u_bar.isApprox(-0.8 * vec2(1.0, -2.0)));
}

TEST_CASE("u_bar on the orbital plant with a cancelling neighbor pair") {
  const LagrangianPlant plant = make_leo_hcw_plant(0.3);
  FilterGains gains;
  gains.k_p = 1.3;
  gains.k_v = 0.6;
  const SafetyConfig cfg = cfg_default();
  Observation obs;
  obs.self = AgentState(vec3(1.0, 0.5, -0.2), vec3(0, 0, 0));
  obs.self_index = 0;
  obs.neighbor_agents.emplace_back(1,
                                   AgentState(obs.self.p + vec3(1.0, 0, 0), vec3(0, 0, 0)));
  obs.neighbor_agents.emplace_back(2,
                                   AgentState(obs.self.p - vec3(1.0, 0, 0), vec3(0, 0, 0)));
  // Fully static configuration: the gradient pair cancels, v_d = 0,
  // vdot_d = 0 and e_v = 0, leaving only the gravity term.
  const Vector u_bar =
      u_bar_lagrangian(plant, obs, neighbor_velocities_of(obs), cfg, gains);
  CHECK(u_bar.isApprox(plant.gravity(obs.self.p), 1e-12));

  // With the agent sliding parallel to the pair axis the gradient value
  // still cancels but its rate does not: each term contributes -g v, so
  // vdot_d = 2 k_p g v with g = 1 / (scale * w * h).
  obs.self.v = vec3(0, -0.4, 0.25);
  const Vector u_bar_moving =
      u_bar_lagrangian(plant, obs, neighbor_velocities_of(obs), cfg, gains);
  const Scalar h = clearance(vec3(1.0, 0, 0), cfg);
  const Scalar g = 1.0 / (cfg.clearance_scale() * 1.0 * h);
  const Vector v_d_dot = 2.0 * gains.k_p * g * obs.self.v;
  const Vector expected = v_d_dot + plant.gravity(obs.self.p) +
                          plant.coriolis(obs.self.p, obs.self.v) * Vector::Zero(3) -
                          gains.k_v * obs.self.v;
  CHECK(u_bar_moving.isApprox(expected, 1e-10));
}

TEST_CASE("revised and draft u_bar variants coincide under the gradient rule") {
  const LagrangianPlant plant = make_leo_hcw_plant(0.2);
  const SafetyConfig cfg = cfg_default();
  for (int trial = 0; trial < 25; ++trial) {
    Observation obs;
    obs.self = AgentState(rng::normal_vector(rng::key(81, trial), 3),
                          rng::normal_vector(rng::key(82, trial), 3));
    obs.self_index = 0;
    const Vector offset =
        rng::uniform(rng::key(83, trial), 0.8, 1.8) * rng::unit_vector(rng::key(84, trial), 3);
    obs.neighbor_agents.emplace_back(
        1, AgentState(obs.self.p + offset, rng::normal_vector(rng::key(85, trial), 3)));
    FilterGains gains;
    gains.k_p = 1.4;
    gains.k_v = 0.9;
    gains.u_bar_variant = UBarVariant::kRevised;
    const Vector revised =
        u_bar_lagrangian(plant, obs, neighbor_velocities_of(obs), cfg, gains);
    gains.u_bar_variant = UBarVariant::kDraft;
    const Vector draft =
        u_bar_lagrangian(plant, obs, neighbor_velocities_of(obs), cfg, gains);
    CHECK((revised - draft).norm() < 1e-14);
  }
}

TEST_CASE("projection case split") {
  const Vector u_bar = vec2(0.5, -0.5);
  // Zero direction: the branch condition is false and no division happens.
  SafetyFilterOutput out = project_input(vec2(3, 4), u_bar, vec2(0, 0));
  CHECK(!out.active);
  CHECK(out.u.isApprox(vec2(3, 4)));
  // Satisfied constraint passes through bit for bit.
  const Vector e_v = vec2(1, 0);
  out = project_input(u_bar - e_v, u_bar, e_v);
  CHECK(!out.active);
  CHECK(out.constraint_value == doctest::Approx(-1.0));
  CHECK((out.u == u_bar - e_v));
  // u = u_bar + e_v projects exactly onto u_bar.
  out = project_input(u_bar + e_v, u_bar, e_v);
  CHECK(out.active);
  CHECK(out.constraint_value == doctest::Approx(e_v.squaredNorm()));
  CHECK(out.u.isApprox(u_bar, 1e-14));
  CHECK(std::abs((out.u - u_bar).dot(e_v)) <= 1e-12);
}

TEST_CASE("filter feasibility and minimal deviation over random instances") {
  for (int trial = 0; trial < 400; ++trial) {
    const std::uint64_t k = rng::key(85, trial);
    const Index m = 1 + static_cast<Index>(rng::uniform(rng::mix(k, 0)) * 6);
    const Vector u_l = 2.0 * rng::normal_vector(rng::mix(k, 1), m);
    const Vector u_bar = 2.0 * rng::normal_vector(rng::mix(k, 2), m);
    const Vector w = rng::normal_vector(rng::mix(k, 3), m);
    const SafetyFilterOutput out = project_input(u_l, u_bar, w);
    CHECK((out.u - u_bar).dot(w) <= 1e-12);
    CHECK(out.active == (out.constraint_value > 0));
    if (!out.active) CHECK((out.u == u_l));
    // Any feasible point is at least as far from u_l.
    for (int probe = 0; probe < 20; ++probe) {
      Vector candidate = u_l + rng::normal_vector(rng::key(k, 4, probe), m);
      const Scalar violation = (candidate - u_bar).dot(w);
      if (violation > 0) candidate -= w * (violation / w.squaredNorm());
      CHECK((out.u - u_l).norm() <= (candidate - u_l).norm() + 1e-9);
    }
    // And the stationarity-system oracle agrees.
    CHECK((out.u - qp_oracle_halfspace(u_l, u_bar, w)).norm() <= 1e-12);
  }
}

TEST_CASE("halfspace oracle geometry") {
  const Vector u_bar = vec2(1, 1);
  const Vector w = vec2(0, 2);
  // Interior nominal input is returned untouched.
  CHECK(qp_oracle_halfspace(vec2(0.5, 0.5), u_bar, w).isApprox(vec2(0.5, 0.5)));
  // A violating input lands on the hyperplane (u - u_bar)ᵀw = 0.
  const Vector projected = qp_oracle_halfspace(vec2(0.5, 3.0), u_bar, w);
  CHECK(std::abs((projected - u_bar).dot(w)) < 1e-12);
  CHECK(projected[0] == doctest::Approx(0.5));
}

TEST_CASE("general filter pass-through cases") {
  const AffinePlant plant = make_nonlinear_example_plant();
  const SafetyConfig cfg = cfg_default();
  FilterGains gains;
  const Matrix metric = Matrix::Identity(2, 2);

  // v = v_d means e_v_bar = 0 and u_bar = 0.
  Observation obs;
  obs.self = AgentState(vec2(0, 0), vec2(0, 0));
  obs.neighbor_obstacles.emplace_back(0, vec2(1.0, 0.0));
  const Vector v_d = safe_velocity(obs, cfg, gains.k_p);
  obs.self.v = v_d;
  const GeneralFilterContext ctx =
      general_filter_context(plant, obs, {}, cfg, gains, metric);
  CHECK(ctx.e_v_bar.norm() == doctest::Approx(0.0));
  CHECK(ctx.u_bar.norm() == doctest::Approx(0.0));
  const Vector u_l = vec2(0.7, -0.4);
  CHECK(safety_filter_general(u_l, plant, obs, {}, cfg, gains, metric).u.isApprox(u_l));
}

TEST_CASE("general u_bar reduces to the hand form for B = M = I") {
  const AffinePlant plant = make_nonlinear_example_plant();
  const SafetyConfig cfg = cfg_default();
  FilterGains gains;
  gains.k_p = 1.1;
  Observation obs;
  obs.self = AgentState(vec2(0.2, -0.1), vec2(0.5, 0.3));
  obs.neighbor_obstacles.emplace_back(0, vec2(1.2, 0.4));
  const Matrix metric = Matrix::Identity(2, 2);
  const GeneralFilterContext ctx =
      general_filter_context(plant, obs, {}, cfg, gains, metric);
  const BarrierEval barrier = eval_barrier(obs, cfg);
  const Vector v_d = -gains.k_p * barrier.grad_p;
  const Vector e_v = obs.self.v - v_d;
  const Vector v_d_dot = safe_velocity_rate(obs, {}, cfg, gains.k_p);
  const Vector f_d = plant.drift(obs.self.p, v_d, 0.0);
  const Scalar numer =
      e_v.dot(v_d_dot - f_d) - gains.k_p * e_v.dot(barrier.grad_p);
  const Vector expected = e_v * (numer / e_v.squaredNorm());
  CHECK(ctx.u_bar.isApprox(expected, 1e-12));
  CHECK(ctx.e_v_bar.isApprox(e_v, 1e-12));
}

TEST_CASE("underactuated direction orthogonal to the error passes through") {
  const AffinePlant plant = make_nonlinear_example_plant(true);  // B = [1; 0]
  const SafetyConfig cfg = cfg_default();
  FilterGains gains;
  Observation obs;
  obs.self = AgentState(vec2(0, 0), vec2(0, 0));
  obs.neighbor_obstacles.emplace_back(0, vec2(1.0, 0.0));
  const Vector v_d = safe_velocity(obs, cfg, gains.k_p);
  obs.self.v = v_d + vec2(0.0, 1.0);  // e_v along the unactuated axis
  const Matrix metric = Matrix::Identity(2, 2);
  const GeneralFilterContext ctx =
      general_filter_context(plant, obs, {}, cfg, gains, metric);
  CHECK(ctx.e_v.norm() > 0.5);
  CHECK(ctx.e_v_bar.norm() == doctest::Approx(0.0));
  Vector u_l(1);
  u_l << 0.3;
  CHECK(safety_filter_general(u_l, plant, obs, {}, cfg, gains, metric).u.isApprox(u_l));
}

TEST_CASE("full actuation makes a vanishing weighted error imply e_v = 0") {
  CHECK(is_fully_actuated(Matrix::Identity(3, 3)));
  Matrix wide(2, 3);
  wide << 1, 0, 0.5, 0, 1, 0.5;
  CHECK(is_fully_actuated(wide));  // over-actuated
  Matrix tall(2, 1);
  tall << 1, 0;
  CHECK(!is_fully_actuated(tall));
  // With B square invertible and M positive definite, Bᵀ M e_v = 0 forces
  // e_v = 0; verified numerically through the context.
  const AffinePlant plant = make_nonlinear_example_plant();
  const SafetyConfig cfg = cfg_default();
  FilterGains gains;
  Matrix metric(2, 2);
  metric << 1.3, 0.2, 0.2, 0.9;
  Observation obs;
  obs.self = AgentState(vec2(0.1, 0.1), vec2(0, 0));
  obs.neighbor_obstacles.emplace_back(0, vec2(1.0, 0.6));
  const Vector v_d = safe_velocity(obs, cfg, gains.k_p);
  obs.self.v = v_d;
  const GeneralFilterContext ctx =
      general_filter_context(plant, obs, {}, cfg, gains, metric);
  CHECK(ctx.e_v_bar.norm() <= 1e-12);
  CHECK(ctx.e_v.norm() <= 1e-9);
}

TEST_CASE("lagrangian and affine constraint values differ by the damping term") {
  // For a Lagrangian plant rewritten as an affine system with metric
  // M(p) and B = M^{-1}, the general u_bar satisfies
  //   u_bar_gen . e_v = u_bar_lag . e_v + k_v |e_v|^2_M.
  const LagrangianPlant unit = make_unit_mass_plant(2);
  const AffinePlant affine = to_affine(unit);
  const SafetyConfig cfg = cfg_default();
  FilterGains gains;
  gains.k_p = 1.2;
  gains.k_v = 0.7;
  for (int trial = 0; trial < 50; ++trial) {
    Observation obs;
    obs.self = AgentState(0.2 * rng::normal_vector(rng::key(87, trial), 2),
                          rng::normal_vector(rng::key(88, trial), 2));
    obs.self_index = 0;
    const Vector offset = rng::uniform(rng::key(89, trial), 0.8, 1.8) *
                          rng::unit_vector(rng::key(90, trial), 2);
    obs.neighbor_agents.emplace_back(
        1, AgentState(obs.self.p + offset, rng::normal_vector(rng::key(91, trial), 2)));
    const auto velocities = neighbor_velocities_of(obs);
    const Vector u_bar_lag = u_bar_lagrangian(unit, obs, velocities, cfg, gains);
    const Matrix metric = unit.mass(obs.self.p);
    const Vector u_bar_gen =
        u_bar_general(affine, obs, velocities, cfg, gains, metric);
    const Vector e_v = obs.self.v - safe_velocity(obs, cfg, gains.k_p);
    const Scalar lhs = u_bar_gen.dot(e_v);
    const Scalar rhs = u_bar_lag.dot(e_v) + gains.k_v * e_v.dot(metric * e_v);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}
