#include <safetrack/barrier.hpp>

#include <cmath>

namespace safetrack {

Scalar clearance(const Vector& p_ij, const SafetyConfig& cfg) {
  return (cfg.weighted_norm(p_ij) - cfg.inflated_radius()) / cfg.clearance_scale();
}

PairwiseSafety distance_pairwise_safety(const SafetyConfig& cfg) {
  PairwiseSafety pw;
  pw.value = [cfg](const AgentState& self, const AgentState& other) {
    return clearance(other.p - self.p, cfg);
  };
  // d h / d p_self = -Xi p_ij / (||p_ij||_Xi * scale) with p_ij = p_other - p_self.
  pw.grad_self_p = [cfg](const AgentState& self, const AgentState& other) -> Vector {
    const Vector p_ij = other.p - self.p;
    const Matrix xi = cfg.xi_or_identity(p_ij.size());
    const Vector xp = xi * p_ij;
    const Scalar w = cfg.weighted_norm(p_ij);
    return -xp / (w * cfg.clearance_scale());
  };
  return pw;
}

BarrierEval eval_barrier(const Observation& obs, const SafetyConfig& cfg) {
  return eval_barrier(obs, cfg, distance_pairwise_safety(cfg));
}

BarrierEval eval_barrier(const Observation& obs, const SafetyConfig& cfg,
                         const PairwiseSafety& pairwise) {
  (void)cfg;
  BarrierEval out;
  const Index n = obs.self.dim();
  out.grad_p = Vector::Zero(n);

  auto accumulate = [&](const AgentState& other, bool is_obstacle, int index) {
    const Scalar h = pairwise.value(obs.self, other);
    out.h_values.push_back({is_obstacle, index, h});
    if (h < out.min_h) out.min_h = h;
    if (h < kClearanceFloor)
      throw NotSafeError("eval_barrier: clearance at or below floor for object " +
                         std::to_string(index));
    out.psi -= std::log(h);
    out.grad_p -= pairwise.grad_self_p(obs.self, other) / h;
  };

  for (const auto& [index, state] : obs.neighbor_agents) accumulate(state, false, index);
  for (const auto& [index, pos] : obs.neighbor_obstacles)
    accumulate(AgentState(pos, Vector::Zero(n)), true, index);
  return out;
}

Vector safe_velocity(const Observation& obs, const SafetyConfig& cfg, Scalar k_p) {
  return -k_p * eval_barrier(obs, cfg).grad_p;
}

std::vector<Vector> neighbor_velocities_of(const Observation& obs) {
  std::vector<Vector> velocities;
  velocities.reserve(obs.neighbor_agents.size());
  for (const auto& [index, state] : obs.neighbor_agents) velocities.push_back(state.v);
  return velocities;
}

Vector safe_velocity_rate(const Observation& obs,
                          const std::vector<Vector>& neighbor_velocities,
                          const SafetyConfig& cfg, Scalar k_p) {
  const Index n = obs.self.dim();
  if (neighbor_velocities.size() != obs.neighbor_agents.size())
    throw ValidationError("safe_velocity_rate: neighbor velocity list misaligned");
  const Matrix xi = cfg.xi_or_identity(n);
  const Scalar scale = cfg.clearance_scale();

  Vector grad_rate = Vector::Zero(n);
  auto accumulate = [&](const Vector& p_other, const Vector& v_other, int index) {
    const Vector r = p_other - obs.self.p;
    const Vector r_dot = v_other - obs.self.v;
    const Vector xr = xi * r;
    const Scalar w = std::sqrt(r.dot(xr));
    const Scalar w_dot = xr.dot(r_dot) / w;
    const Scalar h = (w - cfg.inflated_radius()) / scale;
    if (h < kClearanceFloor)
      throw NotSafeError("safe_velocity_rate: clearance at or below floor for object " +
                         std::to_string(index));
    const Scalar h_dot = w_dot / scale;
    // grad psi = sum_j xr * g with g = 1 / (scale * w * h).
    const Scalar g = 1.0 / (scale * w * h);
    const Scalar g_dot = -g * (w_dot / w + h_dot / h);
    grad_rate += (xi * r_dot) * g + xr * g_dot;
  };

  for (std::size_t k = 0; k < obs.neighbor_agents.size(); ++k)
    accumulate(obs.neighbor_agents[k].second.p, neighbor_velocities[k],
               obs.neighbor_agents[k].first);
  const Vector zero = Vector::Zero(n);
  for (const auto& [index, pos] : obs.neighbor_obstacles) accumulate(pos, zero, index);

  return -k_p * grad_rate;
}

Vector safe_velocity_rate(const Observation& obs, const SafetyConfig& cfg, Scalar k_p) {
  return safe_velocity_rate(obs, neighbor_velocities_of(obs), cfg, k_p);
}

}  // namespace safetrack
