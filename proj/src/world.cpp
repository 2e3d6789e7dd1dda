#include <safetrack/world.hpp>

#include <safetrack/barrier.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace safetrack {

void AgentState::validate() const {
  if (p.size() < 1) throw ValidationError("AgentState.p: dimension must be >= 1");
  if (p.size() != v.size())
    throw ValidationError("AgentState.v: length must match AgentState.p");
  if (!p.allFinite() || !v.allFinite())
    throw ValidationError("AgentState: entries must be finite");
}

Index World::dim() const {
  return agents.empty() ? 0 : agents.front().dim();
}

void World::validate() const {
  if (agents.empty()) throw ValidationError("World.agents: need at least one agent");
  const Index n = agents.front().dim();
  for (const AgentState& a : agents) {
    a.validate();
    if (a.dim() != n)
      throw ValidationError("World.agents: all agents must share one dimension");
  }
  for (const Vector& o : obstacles) {
    if (o.size() != n)
      throw ValidationError("World.obstacles: positions must have the agent dimension");
    if (!o.allFinite())
      throw ValidationError("World.obstacles: entries must be finite");
  }
}

Matrix SafetyConfig::xi_or_identity(Index n) const {
  if (xi.size() == 0) return Matrix::Identity(n, n);
  return xi;
}

Scalar SafetyConfig::weighted_norm(const Vector& p_ij) const {
  if (xi.size() == 0) return p_ij.norm();
  return std::sqrt(p_ij.dot(xi * p_ij));
}

void SafetyConfig::validate(Index dim) const {
  if (!(r_s > 0)) throw ValidationError("SafetyConfig.r_s: must be > 0");
  if (!(delta_r_s > 0)) throw ValidationError("SafetyConfig.delta_r_s: must be > 0");
  if (!(clearance_scale() > 0))
    throw ValidationError("SafetyConfig.r_sen: requires r_sen - (r_s + delta_r_s) > 0");
  if (xi.size() != 0) {
    if (xi.rows() != dim || xi.cols() != dim)
      throw ValidationError("SafetyConfig.xi: must be dim x dim");
    if (!xi.isApprox(xi.transpose(), 1e-10))
      throw ValidationError("SafetyConfig.xi: must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(xi);
    if (es.eigenvalues().minCoeff() <= 0)
      throw ValidationError("SafetyConfig.xi: must be positive definite");
    // Largest eigenvalue <= 1 keeps the weighted norm below the Euclidean
    // one, so clearances stay <= 1 inside the sensing radius.
    if (es.eigenvalues().maxCoeff() > 1.0 + 1e-12)
      throw ValidationError("SafetyConfig.xi: largest eigenvalue must be <= 1");
  }
}

Observation observe(const World& world, int agent_index, const SafetyConfig& cfg) {
  if (agent_index < 0 || agent_index >= static_cast<int>(world.agents.size()))
    throw ValidationError("observe: agent_index out of range");
  Observation obs;
  obs.self_index = agent_index;
  obs.self = world.agents[agent_index];
  obs.time = world.time;
  const Vector& p_i = obs.self.p;
  for (int j = 0; j < static_cast<int>(world.agents.size()); ++j) {
    if (j == agent_index) continue;
    if ((world.agents[j].p - p_i).norm() <= cfg.r_sen)
      obs.neighbor_agents.emplace_back(j, world.agents[j]);
  }
  for (int j = 0; j < static_cast<int>(world.obstacles.size()); ++j) {
    if ((world.obstacles[j] - p_i).norm() <= cfg.r_sen)
      obs.neighbor_obstacles.emplace_back(j, world.obstacles[j]);
  }
  return obs;
}

namespace {

template <typename PairFn>
void for_each_in_range_pair(const World& world, const SafetyConfig& cfg, PairFn&& fn) {
  const int n_agents = static_cast<int>(world.agents.size());
  for (int i = 0; i < n_agents; ++i) {
    for (int j = i + 1; j < n_agents; ++j) {
      const Vector p_ij = world.agents[j].p - world.agents[i].p;
      if (p_ij.norm() <= cfg.r_sen) fn(p_ij);
    }
    for (const Vector& o : world.obstacles) {
      const Vector p_io = o - world.agents[i].p;
      if (p_io.norm() <= cfg.r_sen) fn(p_io);
    }
  }
}

}  // namespace

Scalar global_safety_product(const World& world, const SafetyConfig& cfg) {
  Scalar product = 1.0;
  for_each_in_range_pair(world, cfg,
                         [&](const Vector& p_ij) { product *= clearance(p_ij, cfg); });
  return product;
}

Scalar global_log_barrier(const World& world, const SafetyConfig& cfg) {
  Scalar psi = 0.0;
  for_each_in_range_pair(world, cfg, [&](const Vector& p_ij) {
    const Scalar h = clearance(p_ij, cfg);
    if (h < kClearanceFloor)
      throw NotSafeError("global_log_barrier: clearance at or below floor");
    psi -= std::log(h);
  });
  return psi;
}

Scalar global_min_clearance(const World& world, const SafetyConfig& cfg) {
  Scalar min_h = std::numeric_limits<Scalar>::infinity();
  const int n_agents = static_cast<int>(world.agents.size());
  for (int i = 0; i < n_agents; ++i) {
    for (int j = i + 1; j < n_agents; ++j)
      min_h = std::min(min_h, clearance(world.agents[j].p - world.agents[i].p, cfg));
    for (const Vector& o : world.obstacles)
      min_h = std::min(min_h, clearance(o - world.agents[i].p, cfg));
  }
  return min_h;
}

}  // namespace safetrack
