#include <safetrack/safety_filter.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace safetrack {

Scalar RobustGains::lambda_min(Index n) const {
  if (lambda_r.size() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(lambda_r);
  return es.eigenvalues().minCoeff();
  (void)n;
}

void RobustGains::validate(Index n) const {
  if (!(k_r > 0)) throw ValidationError("RobustGains.k_r: must be > 0");
  if (!(epsilon_d > 0)) throw ValidationError("RobustGains.epsilon_d: must be > 0");
  if (lambda_r.size() != 0) {
    if (lambda_r.rows() != n || lambda_r.cols() != n)
      throw ValidationError("RobustGains.lambda_r: must be n x n");
    if (!lambda_r.isApprox(lambda_r.transpose(), 1e-10))
      throw ValidationError("RobustGains.lambda_r: must be symmetric");
    if (lambda_min(n) <= 0)
      throw ValidationError("RobustGains.lambda_r: must be positive definite");
  }
}

void FilterGains::validate(Index n, Index m) const {
  if (!(k_p > 0)) throw ValidationError("FilterGains.k_p: must be > 0");
  if (!(k_v > 0)) throw ValidationError("FilterGains.k_v: must be > 0");
  if (!(q_margin > 0)) throw ValidationError("FilterGains.q_margin: must be > 0");
  if (replan_interval < 1)
    throw ValidationError("FilterGains.replan_interval: must be >= 1");
  if (actuation_weight.size() != 0 &&
      (actuation_weight.rows() != m || actuation_weight.cols() != m))
    throw ValidationError("FilterGains.actuation_weight: must be m x m");
  robust.validate(n);
}

Vector u_bar_lagrangian(const LagrangianPlant& plant, const Observation& obs,
                        const std::vector<Vector>& neighbor_velocities,
                        const SafetyConfig& cfg, const FilterGains& gains) {
  const BarrierEval barrier = eval_barrier(obs, cfg);
  const Vector v_d = -gains.k_p * barrier.grad_p;
  const Vector v_d_dot = safe_velocity_rate(obs, neighbor_velocities, cfg, gains.k_p);
  const Vector e_v = obs.self.v - v_d;
  const Vector& p = obs.self.p;
  const Vector& v = obs.self.v;
  const Matrix mass = plant.mass(p);
  Vector u_bar = mass * v_d_dot + plant.coriolis(p, v) * v_d + plant.gravity(p) +
                 plant.damping(p, v) - gains.k_v * (mass * e_v);
  if (gains.u_bar_variant == UBarVariant::kRevised) {
    u_bar += v_d;
  } else {
    u_bar += -gains.k_p * barrier.grad_p;
  }
  return u_bar;
}

SafetyFilterOutput safety_filter_lagrangian(const Vector& u_nominal,
                                            const LagrangianPlant& plant,
                                            const Observation& obs,
                                            const std::vector<Vector>& neighbor_velocities,
                                            const SafetyConfig& cfg,
                                            const FilterGains& gains) {
  const Vector u_bar = u_bar_lagrangian(plant, obs, neighbor_velocities, cfg, gains);
  const Vector v_d = safe_velocity(obs, cfg, gains.k_p);
  const Vector e_v = obs.self.v - v_d;
  SafetyFilterOutput out = project_input(u_nominal, u_bar, e_v);
  out.e_v = e_v;
  return out;
}

GeneralFilterContext general_filter_context(const AffinePlant& plant,
                                            const Observation& obs,
                                            const std::vector<Vector>& neighbor_velocities,
                                            const SafetyConfig& cfg,
                                            const FilterGains& gains,
                                            const Matrix& metric) {
  GeneralFilterContext ctx;
  const BarrierEval barrier = eval_barrier(obs, cfg);
  ctx.grad_psi = barrier.grad_p;
  ctx.v_d = -gains.k_p * barrier.grad_p;
  ctx.v_d_dot = safe_velocity_rate(obs, neighbor_velocities, cfg, gains.k_p);
  ctx.e_v = obs.self.v - ctx.v_d;
  ctx.M = metric;
  const Matrix b = plant.actuation(obs.self.p, obs.self.v, obs.time);
  ctx.e_v_bar = b.transpose() * (metric * ctx.e_v);
  ctx.f_d = plant.drift(obs.self.p, ctx.v_d, obs.time);
  const Scalar denom = ctx.e_v_bar.squaredNorm();
  if (denom > 0.0) {
    const Scalar numer = ctx.e_v.dot(metric * (ctx.v_d_dot - ctx.f_d)) -
                         gains.k_p * ctx.e_v.dot(barrier.grad_p);
    ctx.u_bar = ctx.e_v_bar * (numer / denom);
  } else {
    ctx.u_bar = Vector::Zero(plant.dim_input);
  }
  return ctx;
}

Vector u_bar_general(const AffinePlant& plant, const Observation& obs,
                     const std::vector<Vector>& neighbor_velocities,
                     const SafetyConfig& cfg, const FilterGains& gains,
                     const Matrix& metric) {
  return general_filter_context(plant, obs, neighbor_velocities, cfg, gains, metric)
      .u_bar;
}

SafetyFilterOutput safety_filter_general(const Vector& u_nominal,
                                         const AffinePlant& plant,
                                         const Observation& obs,
                                         const std::vector<Vector>& neighbor_velocities,
                                         const SafetyConfig& cfg,
                                         const FilterGains& gains,
                                         const Matrix& metric) {
  const GeneralFilterContext ctx =
      general_filter_context(plant, obs, neighbor_velocities, cfg, gains, metric);
  SafetyFilterOutput out = project_input(u_nominal, ctx.u_bar, ctx.e_v_bar);
  out.e_v = ctx.e_v;
  return out;
}

bool is_fully_actuated(const Matrix& B, Scalar tol) {
  const Index n = B.rows();
  const Matrix pinv = B.completeOrthogonalDecomposition().pseudoInverse();
  return (B * pinv - Matrix::Identity(n, n)).norm() <= tol;
}

}  // namespace safetrack
