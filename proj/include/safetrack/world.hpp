#pragma once

#include <safetrack/types.hpp>

#include <utility>
#include <vector>

namespace safetrack {

/// Generalized position and velocity of one agent.
struct AgentState {
  Vector p;
  Vector v;

  AgentState() = default;
  AgentState(Vector p_, Vector v_) : p(std::move(p_)), v(std::move(v_)) {}

  Index dim() const { return p.size(); }
  void validate() const;
};

/// Snapshot of all agents and static obstacles.
struct World {
  std::vector<AgentState> agents;
  std::vector<Vector> obstacles;
  Scalar time = 0.0;

  Index dim() const;
  void validate() const;
};

/// Barrier geometry: safe radius, robustness margin, sensing radius and
/// the ellipsoid weight used inside the clearance norm.
struct SafetyConfig {
  Scalar r_s = 0.5;
  Scalar delta_r_s = 0.1;
  Scalar r_sen = 2.0;
  Matrix xi;  // empty means identity

  Scalar inflated_radius() const { return r_s + delta_r_s; }
  Scalar clearance_scale() const { return r_sen - inflated_radius(); }
  Matrix xi_or_identity(Index n) const;

  /// Weighted norm of a relative position.
  Scalar weighted_norm(const Vector& p_ij) const;

  void validate(Index dim) const;
};

/// An agent's local view: its own state plus every object within the
/// sensing radius, ordered by ascending index.
struct Observation {
  int self_index = -1;
  AgentState self;
  std::vector<std::pair<int, AgentState>> neighbor_agents;
  std::vector<std::pair<int, Vector>> neighbor_obstacles;
  Scalar time = 0.0;
};

/// Extracts agent_index's local observation. Inclusion uses the plain
/// Euclidean distance (boundary inclusive); only clearances use xi.
Observation observe(const World& world, int agent_index, const SafetyConfig& cfg);

/// Product of pairwise clearances over in-range unordered agent pairs and
/// in-range agent-obstacle pairs; 1 for the empty product.
Scalar global_safety_product(const World& world, const SafetyConfig& cfg);

/// Sum of -log h over the same pairs. Finite and nonnegative iff every
/// in-range pair is strictly clear of the inflated radius.
Scalar global_log_barrier(const World& world, const SafetyConfig& cfg);

/// Smallest clearance over all object pairs, in range or not.
Scalar global_min_clearance(const World& world, const SafetyConfig& cfg);

}  // namespace safetrack
