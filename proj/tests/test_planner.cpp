#include <doctest.h>

#include <safetrack/planner.hpp>

#include <cmath>

using namespace safetrack;

namespace {

Vector vec3(Scalar x, Scalar y, Scalar z) {
  Vector v(3);
  v << x, y, z;
  return v;
}

SafetyConfig cfg_default() {
  SafetyConfig cfg;
  cfg.r_s = 0.4;
  cfg.delta_r_s = 0.1;
  cfg.r_sen = 2.0;
  // Heading differences barely count toward collisions.
  Matrix xi = Matrix::Identity(3, 3);
  xi(2, 2) = 0.01;
  cfg.xi = xi;
  return cfg;
}

// Minimal-energy cost of a double-integrator transfer per axis: the optimal
// input is affine in time; J has a closed form from the boundary conditions.
Scalar min_energy_cost(const Vector& p0, const Vector& v0, const Vector& pf,
                       const Vector& vf, Scalar horizon) {
  Scalar cost = 0.0;
  const Scalar T = horizon;
  for (Index axis = 0; axis < p0.size(); ++axis) {
    const Scalar dv = vf[axis] - v0[axis];
    const Scalar dp = pf[axis] - p0[axis] - v0[axis] * T;
    // Solve [T, T^2/2; T^2/2, T^3/6] [c0; c1] = [dv; dp].
    const Scalar det = T * (T * T * T / 6.0) - (T * T / 2.0) * (T * T / 2.0);
    const Scalar c0 = ((T * T * T / 6.0) * dv - (T * T / 2.0) * dp) / det;
    const Scalar c1 = (T * dp - (T * T / 2.0) * dv) / det;
    cost += c0 * c0 * T + c0 * c1 * T * T + c1 * c1 * T * T * T / 3.0;
  }
  return cost;
}

}  // namespace

TEST_CASE("single-agent transfer approaches the minimal-energy cost") {
  const Plant plant = make_plant("spacecraft_planar");
  World world;
  world.agents = {AgentState(vec3(0, 0, 0), vec3(0, 0, 0))};
  const std::vector<AgentState> goals = {AgentState(vec3(2.0, 1.0, 0.3), vec3(0, 0, 0))};
  const Scalar horizon = 6.0;
  PlannerOptions options;
  options.knots = 30;
  options.gn_iterations = 10;
  const TrajectorySchedule plan =
      plan_global_reference(plant, world, goals, horizon, cfg_default(), options);
  const Scalar oracle = min_energy_cost(world.agents[0].p, world.agents[0].v,
                                        goals[0].p, goals[0].v, horizon);
  CHECK(plan.predicted_cost <= 1.05 * oracle);
  CHECK(plan.predicted_cost >= 0.90 * oracle);
  // The planned endpoint reaches the goal.
  const auto end = plan.at(0, horizon);
  CHECK((end.p - goals[0].p).norm() < 0.05);
  CHECK((end.v - goals[0].v).norm() < 0.05);
}

TEST_CASE("two agents swap without losing clearance") {
  const Plant plant = make_plant("spacecraft_planar");
  World world;
  world.agents = {AgentState(vec3(-1.5, 0.02, 0), vec3(0, 0, 0)),
                  AgentState(vec3(1.5, -0.02, 0), vec3(0, 0, 0))};
  const std::vector<AgentState> goals = {AgentState(vec3(1.5, 0.02, 0), vec3(0, 0, 0)),
                                         AgentState(vec3(-1.5, -0.02, 0), vec3(0, 0, 0))};
  SafetyConfig cfg = cfg_default();
  PlannerOptions options;
  options.knots = 25;
  options.agent_sweeps = 4;
  const TrajectorySchedule plan =
      plan_global_reference(plant, world, goals, 8.0, cfg, options);
  CHECK(schedule_min_clearance(plan, world.obstacles, cfg) > 0.0);
  for (int agent = 0; agent < 2; ++agent)
    CHECK((plan.at(agent, 8.0).p - goals[agent].p).norm() < 0.08);
}

TEST_CASE("an impossible corridor reports planner failure") {
  const Plant plant = make_plant("spacecraft_planar");
  World world;
  world.agents = {AgentState(vec3(-2.0, 0, 0), vec3(0, 0, 0))};
  // A long wall of obstacles with gaps far below the inflated radius.
  for (Scalar y = -6.0; y <= 6.0; y += 0.3) world.obstacles.push_back(vec3(0.0, y, 0));
  const std::vector<AgentState> goals = {AgentState(vec3(2.0, 0, 0), vec3(0, 0, 0))};
  SafetyConfig cfg = cfg_default();
  PlannerOptions options;
  options.knots = 20;
  options.gn_iterations = 4;
  CHECK_THROWS_AS(plan_global_reference(plant, world, goals, 6.0, cfg, options),
                  PlannerError);
}

TEST_CASE("collision-blind planning goes straight through") {
  const Plant plant = make_plant("spacecraft_planar");
  World world;
  world.agents = {AgentState(vec3(-2.0, 0, 0), vec3(0, 0, 0))};
  world.obstacles = {vec3(0.0, 0.0, 0)};
  const std::vector<AgentState> goals = {AgentState(vec3(2.0, 0, 0), vec3(0, 0, 0))};
  SafetyConfig cfg = cfg_default();
  PlannerOptions options;
  options.ignore_collisions = true;
  const TrajectorySchedule plan =
      plan_global_reference(plant, world, goals, 6.0, cfg, options);
  // The reference crosses the obstacle: clearance goes negative.
  CHECK(schedule_min_clearance(plan, world.obstacles, cfg) < 0.0);
}
