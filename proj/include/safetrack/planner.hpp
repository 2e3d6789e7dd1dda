#pragma once

#include <safetrack/dynamics.hpp>
#include <safetrack/schedule.hpp>
#include <safetrack/world.hpp>

#include <vector>

namespace safetrack {

struct PlannerOptions {
  int knots = 25;           // control intervals over the horizon
  int gn_iterations = 8;    // Gauss-Newton sweeps per agent solve
  int agent_sweeps = 3;     // coordinate passes over the agents
  Scalar defect_weight = 100.0;
  Scalar terminal_weight = 100.0;
  Scalar collision_weight = 60.0;
  Scalar collision_margin = 0.15;  // extra weighted clearance above the inflated radius
  bool ignore_collisions = false;  // plan a pure tracking reference
  Scalar terminal_tolerance = 0.3;  // worst admissible goal miss of the plan
  Scalar levenberg = 1e-8;

  void validate() const;
};

/// Minimum-effort reference trajectories to per-agent goal states by direct
/// multiple shooting: states and inputs are free variables, dynamics enter
/// as heavily weighted defect residuals, collisions as hinge penalties, and
/// the squared-input cost is minimized by damped Gauss-Newton with
/// per-agent coordinate sweeps. Verifies the resulting plan keeps every
/// pairwise clearance positive and throws PlannerError otherwise.
TrajectorySchedule plan_global_reference(const Plant& plant, const World& initial,
                                         const std::vector<AgentState>& goals,
                                         Scalar horizon, const SafetyConfig& cfg,
                                         const PlannerOptions& options = {});

/// Smallest clearance over the schedule's knots and knot midpoints.
Scalar schedule_min_clearance(const TrajectorySchedule& schedule,
                              const std::vector<Vector>& obstacles,
                              const SafetyConfig& cfg);

}  // namespace safetrack
