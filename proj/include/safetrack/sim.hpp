#pragma once

#include <safetrack/robust_filter.hpp>
#include <safetrack/scenario.hpp>

#include <string>
#include <vector>

namespace safetrack {

/// One closed-loop run. States are stored at tick starts (ticks + 1 in
/// total), inputs and clearance minima per tick.
struct RunResult {
  std::vector<Scalar> times;
  std::vector<std::vector<AgentState>> states;
  std::vector<std::vector<Vector>> inputs;
  std::vector<Scalar> min_h;                     // min clearance within the tick
  std::vector<std::vector<Scalar>> agent_min_h;  // per agent, at tick start
  std::vector<Scalar> tracking_error;            // mean |p - p_d| (tracking mode)
  bool collided = false;
  bool success = false;
  bool not_safe_event = false;
  int qp_infeasible_count = 0;
  int assumption_violations = 0;  // ticks with a rank-deficient actuation map
  Scalar control_effort = 0.0;
  Scalar final_goal_distance = 0.0;
  std::uint64_t rng_seed = 0;
};

/// One Euler-Maruyama step with semi-implicit position update:
///   v += (accel + disturbance) dt + diffusion sqrt(dt) xi,  p += v_new dt.
/// Deterministic in step_key. Throws NonFiniteStateError if the state leaves
/// the finite range.
World em_step(const World& world, const std::vector<Vector>& inputs,
              const Plant& plant, const DisturbanceSpec& disturbance, Scalar dt,
              std::uint64_t step_key);

/// Disturbance-free rollout of the safety-filtered policy from a world
/// snapshot; the tracking layer's target.
SafeTargetTrajectory rollout_safe_target(const World& start, const Plant& plant,
                                         const ScenarioSpec& spec,
                                         const TrajectorySchedule& reference,
                                         Scalar duration, std::uint64_t policy_seed);

/// Executes one run of the scenario. (spec, run_index) determines every
/// output bit.
RunResult run_scenario(const ScenarioSpec& spec, std::uint64_t run_index = 0);

struct Aggregate {
  int n_runs = 0;
  int collisions = 0;
  Scalar success_rate = 0.0;
  Scalar ci_lo = 0.0, ci_hi = 0.0;  // binomial normal-approximation interval
  Scalar mean_effort = 0.0;
  Scalar worst_min_h = 0.0;
  Scalar mean_min_h = 0.0;
  std::vector<Scalar> run_min_h;             // per run, min over time
  std::vector<Scalar> run_effort;            // per run J
  std::vector<Scalar> mean_tracking_error;   // per tick, averaged over runs
  std::vector<Scalar> mean_time_avg_min_h;   // per run, time average of min_h
};

/// Independent seeded runs, optionally on a worker pool; aggregation order
/// is fixed so results do not depend on scheduling.
Aggregate monte_carlo(const ScenarioSpec& spec, int n_runs, int workers = 1);

/// Artifact writers. Every file carries a provenance header or field with
/// the fully resolved scenario and seed.
void write_run_csv(const std::string& path, const ScenarioSpec& spec,
                   const RunResult& result, std::uint64_t run_index);
void write_aggregate_json(const std::string& path, const ScenarioSpec& spec,
                          const Aggregate& aggregate);

}  // namespace safetrack
