#include <safetrack/robust_filter.hpp>

#include <safetrack/rng.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace safetrack {

TrajectorySchedule::Point TrajectorySchedule::at(int agent, Scalar t) const {
  const int last = knots() - 1;
  const Scalar s = (t - t0) / dt;
  const int k = std::clamp(static_cast<int>(std::floor(s)), 0, last - 1);
  const Scalar w = std::clamp(s - static_cast<Scalar>(k), Scalar(0), Scalar(1));
  Point out;
  out.p = (1.0 - w) * p[agent][k] + w * p[agent][k + 1];
  out.v = (1.0 - w) * v[agent][k] + w * v[agent][k + 1];
  out.a = (1.0 - w) * a[agent][k] + w * a[agent][k + 1];
  out.u = u[agent][k];
  return out;
}

TrajectorySchedule::Point TrajectorySchedule::checked_at(int agent, Scalar t) const {
  if (t < t0 - dt || t > end_time() + dt)
    throw ValidationError("TrajectorySchedule: query time outside stored domain");
  return at(agent, t);
}

SafetyFilterOutput robust_filter(const Vector& u_target,
                                 const TrajectorySchedule::Point& target,
                                 const AgentState& state,
                                 const LagrangianPlant& plant,
                                 const RobustGains& gains) {
  const Index n = state.dim();
  const Matrix lambda = gains.lambda_or_identity(n);
  const Vector e_p = state.p - target.p;
  const Vector e_v = state.v - target.v;
  const Vector s = e_v + lambda * e_p;
  const Vector v_r = target.v - lambda * e_p;
  const Vector v_r_dot = target.a - lambda * e_v;
  const Matrix mass = plant.mass(state.p);
  const Vector u_bar = mass * v_r_dot + plant.coriolis(state.p, state.v) * v_r +
                       plant.gravity(state.p) + plant.damping(state.p, state.v) -
                       gains.k_r * (mass * s);
  SafetyFilterOutput out = project_input(u_target, u_bar, s);
  out.e_v = e_v;
  return out;
}

SafetyFilterOutput robust_filter_general(const Vector& u_target,
                                         const TrajectorySchedule::Point& target,
                                         const AgentState& state,
                                         const AffinePlant& plant,
                                         const RobustGains& gains,
                                         const Matrix& metric, Scalar t) {
  const Index n = state.dim();
  const Matrix lambda = gains.lambda_or_identity(n);
  const Vector e_p = state.p - target.p;
  const Vector e_v = state.v - target.v;
  const Vector s = e_v + lambda * e_p;
  const Vector v_r = target.v - lambda * e_p;
  const Vector v_r_dot = target.a - lambda * e_v;
  const Matrix b = plant.actuation(state.p, state.v, t);
  const Vector s_bar = b.transpose() * (metric * s);
  Vector u_bar = Vector::Zero(plant.dim_input);
  const Scalar denom = s_bar.squaredNorm();
  if (denom > 0.0) {
    const Vector f_r = plant.drift(state.p, v_r, t);
    const Scalar numer =
        s.dot(metric * (v_r_dot - f_r)) - gains.k_r * s.dot(metric * s);
    u_bar = s_bar * (numer / denom);
  }
  SafetyFilterOutput out = project_input(u_target, u_bar, s_bar);
  out.e_v = e_v;
  return out;
}

void PlantBounds::validate() const {
  if (!(m_lower > 0) || !(m_upper >= m_lower))
    throw ValidationError("PlantBounds: need 0 < m_lower <= m_upper");
  if (d_s_bar < 0 || m_x_bar < 0 || m_x2_bar < 0)
    throw ValidationError("PlantBounds: derivative bounds must be >= 0");
}

PlantBounds unit_mass_bounds(Scalar gamma_bar) {
  PlantBounds b;
  b.m_lower = 1.0;
  b.m_upper = 1.0;
  b.d_s_bar = gamma_bar * gamma_bar;
  b.m_x_bar = 0.0;
  b.m_x2_bar = 0.0;
  return b;
}

PlantBounds estimate_plant_bounds(const LagrangianPlant& plant, const Vector& p_lo,
                                  const Vector& p_hi, Scalar gamma_bar,
                                  int n_samples, std::uint64_t seed) {
  const Index n = plant.dim;
  PlantBounds out;
  Scalar m_lo = std::numeric_limits<Scalar>::infinity();
  Scalar m_hi = 0.0, mx = 0.0, mx2 = 0.0;
  const Scalar h = 1e-4;
  for (int sample = 0; sample < n_samples; ++sample) {
    Vector p(n);
    for (Index k = 0; k < n; ++k)
      p[k] = rng::uniform(rng::key(seed, sample, k), p_lo[k], p_hi[k]);
    const Matrix m = plant.mass(p);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    m_lo = std::min(m_lo, es.eigenvalues().minCoeff());
    m_hi = std::max(m_hi, es.eigenvalues().maxCoeff());
    for (Index k = 0; k < n; ++k) {
      Vector pp = p, pm = p;
      pp[k] += h;
      pm[k] -= h;
      const Matrix mp = plant.mass(pp), mm = plant.mass(pm);
      mx = std::max(mx, ((mp - mm) / (2.0 * h)).norm());
      mx2 = std::max(mx2, ((mp - 2.0 * m + mm) / (h * h)).norm());
    }
  }
  out.m_lower = m_lo / 1.2;
  out.m_upper = 1.2 * m_hi;
  out.m_x_bar = 1.2 * mx;
  out.m_x2_bar = 1.2 * mx2;
  out.d_s_bar = (gamma_bar / out.m_lower) * (gamma_bar / out.m_lower);
  return out;
}

Scalar ErrorEnvelope::mean_bound(Scalar t) const {
  return a + b * std::exp(-k_r_bar * t);
}

Scalar ErrorEnvelope::expected_deviation(Scalar t) const {
  const Scalar lam = lambda_r_min;
  Scalar value = initial_sq_error * std::exp(-lam * t);
  if (a > 0) value += a * (1.0 - std::exp(-lam * t)) / lam;
  if (b > 0) {
    if (std::abs(lam - k_r_bar) < 1e-9 * std::max<Scalar>(1.0, lam)) {
      value += b * t * std::exp(-k_r_bar * t);
    } else {
      value += b * (std::exp(-k_r_bar * t) - std::exp(-lam * t)) / (lam - k_r_bar);
    }
  }
  return value;
}

Scalar ErrorEnvelope::probability_floor(Scalar t) const {
  const Scalar deviation = expected_deviation(t);
  if (deviation <= 0.0) return 1.0;
  if (D_s <= 0.0) return 0.0;
  return std::max<Scalar>(0.0, 1.0 - deviation / D_s);
}

ErrorEnvelope error_envelope(const RobustGains& gains, const PlantBounds& bounds,
                             const DisturbanceSpec& disturbance,
                             Scalar initial_error, Index dim) {
  bounds.validate();
  disturbance.validate();
  ErrorEnvelope env;
  const Scalar d_bar = disturbance.d_bar;
  const Scalar drag = ((d_bar + bounds.d_s_bar * bounds.m_x_bar) / gains.epsilon_d +
                       0.5 * bounds.d_s_bar * bounds.m_x2_bar) /
                      bounds.m_lower;
  const Scalar two_k_bar = gains.k_r - drag;
  if (!(two_k_bar > 0))
    throw GainError("error_envelope: k_r too small for a positive decay rate");
  env.k_r_bar = 0.5 * two_k_bar;
  env.C_d = (bounds.d_s_bar * bounds.m_upper +
             gains.epsilon_d * (d_bar + bounds.d_s_bar * bounds.m_x_bar)) /
            bounds.m_lower;
  const Scalar steady = env.C_d / (2.0 * env.k_r_bar);
  env.a = std::sqrt(steady);
  const Scalar v0 = bounds.m_upper * initial_error * initial_error;
  env.b = std::sqrt(std::max<Scalar>(0.0, v0 - steady));
  env.lambda_r_min = gains.lambda_min(dim);
  env.initial_sq_error = initial_error * initial_error;
  return env;
}

Scalar margin_from_envelope(const ErrorEnvelope& envelope, Scalar target_probability,
                            Scalar horizon) {
  if (!(target_probability > 0 && target_probability < 1))
    throw ValidationError("margin_from_envelope: probability must be in (0, 1)");
  constexpr int kGrid = 4000;
  Scalar sup = 0.0;
  for (int k = 0; k <= kGrid; ++k)
    sup = std::max(sup, envelope.expected_deviation(horizon * k / kGrid));
  return sup / (1.0 - target_probability);
}

}  // namespace safetrack
