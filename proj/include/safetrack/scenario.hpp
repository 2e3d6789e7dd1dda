#pragma once

#include <safetrack/dynamics.hpp>
#include <safetrack/gains.hpp>
#include <safetrack/planner.hpp>
#include <safetrack/policies.hpp>
#include <safetrack/world.hpp>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace safetrack {

/// Randomized initial or goal configuration: positions rejection-sampled in
/// a box with pairwise clearance at least min_clearance (defaulting to
/// r_s + 2 delta_r_s when nonpositive).
struct RandomizeSpec {
  bool enabled = false;
  Vector p_lo, p_hi;
  bool zero_velocity = true;
  Scalar min_clearance = 0.0;
};

/// Everything that defines one experiment. See the README for the file schema.
struct ScenarioSpec {
  int schema_version = 1;
  std::string name = "scenario";
  std::string plant_key = "unit_mass";
  PlantParams plant_params;
  int n_agents = 1;
  std::vector<Vector> obstacles;
  std::vector<AgentState> initial_states;
  std::vector<AgentState> goal_states;
  RandomizeSpec randomize_initial, randomize_goal;
  SafetyConfig safety;
  FilterGains gains;
  DisturbanceSpec disturbance;
  PolicySpec policy;
  Scalar dt = 0.1;
  int substeps = 10;
  Scalar horizon = 10.0;
  int n_monte_carlo = 1;
  std::uint64_t seed = 0;
  Scalar goal_tolerance = 0.2;
  PlannerOptions planner;
  bool force_general_path = false;  // run a Lagrangian plant through the metric filter

  void validate() const;
};

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec load_scenario(const std::string& path);

/// Applies one `--set path.to.field=value` override onto the scenario JSON.
/// The value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Initial world and goal states for one run, honoring the randomization
/// blocks. Seeded by (spec.seed, run_index).
struct RunSetup {
  World world;
  std::vector<AgentState> goals;
};
RunSetup build_run_setup(const ScenarioSpec& spec, std::uint64_t run_index);

}  // namespace safetrack
