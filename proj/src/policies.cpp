#include <safetrack/policies.hpp>

#include <safetrack/barrier.hpp>
#include <safetrack/rng.hpp>

#include <cmath>

namespace safetrack {

void QpParams::validate() const {
  if (!(alpha_h > 0)) throw ValidationError("QpParams.alpha_h: must be > 0");
  if (!(alpha_v > 0)) throw ValidationError("QpParams.alpha_v: must be > 0");
  if (!(rho_weight > 0)) throw ValidationError("QpParams.rho_weight: must be > 0");
  if (!(input_box_limit > 0))
    throw ValidationError("QpParams.input_box_limit: must be > 0");
  if (!(mu > 0)) throw ValidationError("QpParams.mu: must be > 0");
}

void PolicySpec::validate() const {
  if (!std::isfinite(error_magnitude) || error_magnitude < 0)
    throw ValidationError("PolicySpec.error_magnitude: must be finite and >= 0");
  if (kind == PolicyKind::kClfCbfQp) qp.validate();
}

Vector emulated_policy(const Observation& obs, const TrajectorySchedule& reference,
                       int agent, const PolicySpec& spec, std::uint64_t seed) {
  const Scalar t = obs.time;
  TrajectorySchedule::Point target = reference.at(agent, t);
  Vector u_ff = target.u;
  if (t > reference.end_time()) u_ff.setZero();
  Vector u = u_ff + spec.track_kp * (target.p - obs.self.p) +
             spec.track_kd * (target.v - obs.self.v);
  if (spec.error_magnitude > 0) {
    for (Index c = 0; c < u.size(); ++c) {
      const std::uint64_t k = rng::key(seed, 0x706f6cULL, agent, c);
      const Scalar omega = rng::uniform(rng::mix(k, 1), 0.3, 1.2);
      const Scalar phase = rng::uniform(rng::mix(k, 2), 0.0, 2.0 * M_PI);
      u[c] += spec.error_magnitude * std::sin(omega * t + phase);
    }
  }
  return u;
}

ClfCbfResult clf_cbf_policy(const Observation& obs, const Plant& plant,
                            const TrajectorySchedule& learned_reference, int agent,
                            const Vector& u_learned, const QpParams& params,
                            const SafetyConfig& cfg) {
  const Index n = plant.n();
  const Index m = plant.m();
  const Scalar t = obs.time;
  const Vector& p = obs.self.p;
  const Vector& v = obs.self.v;
  const Matrix xi = cfg.xi_or_identity(n);
  const Scalar scale = cfg.clearance_scale();
  const Vector f = plant.affine.drift(p, v, t);
  const Matrix b_mat = plant.affine.actuation(p, v, t);

  std::vector<Vector> rows;
  std::vector<Scalar> rhs;

  // One composite row per in-range object: with hhat = hdot + mu h, require
  // d(hhat)/dt >= -alpha_h hhat, affine in u through the own acceleration
  // (neighbor accelerations unknown to the agent, taken as zero).
  auto add_clearance_row = [&](const Vector& p_other, const Vector& v_other) {
    const Vector r = p_other - p;
    const Vector r_dot = v_other - v;
    const Vector xr = xi * r;
    const Scalar w = std::sqrt(r.dot(xr));
    const Scalar h = (w - cfg.inflated_radius()) / scale;
    const Scalar h_dot = xr.dot(r_dot) / (w * scale);
    const Scalar drift_term =
        (r_dot.dot(xi * r_dot) - xr.dot(f) - std::pow(xr.dot(r_dot) / w, 2)) /
        (w * scale);
    const Scalar c = drift_term + (params.mu + params.alpha_h) * h_dot +
                     params.alpha_h * params.mu * h;
    Vector row(m + 1);
    row.head(m) = (xr.transpose() * b_mat).transpose() / (w * scale);
    row[m] = 0.0;
    rows.push_back(row);
    rhs.push_back(c);
  };
  for (const auto& [index, state] : obs.neighbor_agents)
    add_clearance_row(state.p, state.v);
  const Vector zero_v = Vector::Zero(n);
  for (const auto& [index, pos] : obs.neighbor_obstacles)
    add_clearance_row(pos, zero_v);

  // Relaxed tracking row toward the learned trajectory:
  // Vdot <= -alpha_v V + rho.
  const TrajectorySchedule::Point ref = learned_reference.at(agent, t);
  const Vector e_p = p - ref.p;
  const Vector e_v = v - ref.v;
  const Scalar lyap = params.w_p * e_p.squaredNorm() + params.w_v * e_v.squaredNorm();
  {
    Vector row(m + 1);
    row.head(m) = 2.0 * params.w_v * (b_mat.transpose() * e_v);
    row[m] = -1.0;
    rows.push_back(row);
    rhs.push_back(-params.alpha_v * lyap - 2.0 * params.w_p * e_p.dot(e_v) -
                  2.0 * params.w_v * e_v.dot(f - ref.a));
  }

  // Box bounds and rho >= 0.
  for (Index k = 0; k < m; ++k) {
    Vector row = Vector::Zero(m + 1);
    row[k] = 1.0;
    rows.push_back(row);
    rhs.push_back(params.input_box_limit);
    row[k] = -1.0;
    rows.push_back(row);
    rhs.push_back(params.input_box_limit);
  }
  {
    Vector row = Vector::Zero(m + 1);
    row[m] = -1.0;
    rows.push_back(row);
    rhs.push_back(0.0);
  }

  QpProblem qp;
  qp.H = Matrix::Zero(m + 1, m + 1);
  qp.H.topLeftCorner(m, m) = 2.0 * Matrix::Identity(m, m);
  qp.H(m, m) = 2.0 * params.rho_weight;
  qp.g = Vector::Zero(m + 1);
  qp.g.head(m) = -2.0 * u_learned;
  qp.A.resize(static_cast<Index>(rows.size()), m + 1);
  qp.b.resize(static_cast<Index>(rows.size()));
  for (std::size_t row = 0; row < rows.size(); ++row) {
    qp.A.row(static_cast<Index>(row)) = rows[row].transpose();
    qp.b[static_cast<Index>(row)] = rhs[row];
  }

  ClfCbfResult result;
  try {
    const QpSolution sol = solve_qp_active_set(qp);
    result.u = sol.z.head(m);
    result.rho = sol.z[m];
  } catch (const QpInfeasibleError&) {
    result.infeasible = true;
    result.u = u_learned.cwiseMax(-params.input_box_limit).cwiseMin(params.input_box_limit);
  }
  return result;
}

}  // namespace safetrack
