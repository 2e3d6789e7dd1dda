#include <safetrack/planner.hpp>

#include <safetrack/barrier.hpp>

#include <Eigen/Dense>

#include <cmath>

namespace safetrack {

void PlannerOptions::validate() const {
  if (knots < 2) throw ValidationError("PlannerOptions.knots: must be >= 2");
  if (gn_iterations < 1 || agent_sweeps < 1)
    throw ValidationError("PlannerOptions: iteration counts must be >= 1");
  if (!(defect_weight > 0) || !(terminal_weight > 0) || !(collision_weight > 0))
    throw ValidationError("PlannerOptions: weights must be > 0");
}

namespace {

struct StackedState {
  Vector x;  // [p; v]
};

Vector pack_state(const Vector& p, const Vector& v) {
  Vector x(p.size() + v.size());
  x << p, v;
  return x;
}

// One RK4 step of xdot = [v; f + B u] with zero-order-hold input.
Vector rk4_step(const AffinePlant& plant, const Vector& x, const Vector& u, Scalar t,
                Scalar dt) {
  const Index n = plant.dim_state;
  auto xdot = [&](const Vector& state, Scalar time) -> Vector {
    Vector d(2 * n);
    d.head(n) = state.tail(n);
    d.tail(n) = plant.acceleration(state.head(n), state.tail(n), u, time);
    return d;
  };
  const Vector k1 = xdot(x, t);
  const Vector k2 = xdot(x + 0.5 * dt * k1, t + 0.5 * dt);
  const Vector k3 = xdot(x + 0.5 * dt * k2, t + 0.5 * dt);
  const Vector k4 = xdot(x + dt * k3, t + dt);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Per-agent nonlinear least squares over [X_1..X_K, U_0..U_{K-1}].
class AgentProblem {
 public:
  AgentProblem(const AffinePlant& plant, const PlannerOptions& opt,
               const SafetyConfig& cfg, Vector x0, Vector x_goal, Scalar dt,
               std::vector<std::vector<Vector>> other_positions,  // [knot][object]
               Scalar margin)
      : plant_(plant),
        opt_(opt),
        cfg_(cfg),
        x0_(std::move(x0)),
        x_goal_(std::move(x_goal)),
        dt_(dt),
        others_(std::move(other_positions)),
        margin_(margin) {
    n_ = plant.dim_state;
    m_ = plant.dim_input;
    k_ = opt.knots;
    state_size_ = 2 * n_;
    z_size_ = k_ * state_size_ + k_ * m_;
  }

  Index z_size() const { return z_size_; }

  Vector initial_guess() const {
    Vector z(z_size_);
    for (int k = 1; k <= k_; ++k) {
      const Scalar w = static_cast<Scalar>(k) / k_;
      z.segment(state_offset(k), state_size_) = (1.0 - w) * x0_ + w * x_goal_;
    }
    z.segment(k_ * state_size_, k_ * m_).setZero();
    return z;
  }

  Index state_offset(int k) const { return (k - 1) * state_size_; }  // k = 1..K
  Index input_offset(int k) const { return k_ * state_size_ + k * m_; }  // k = 0..K-1

  Vector state_at(const Vector& z, int k) const {
    if (k == 0) return x0_;
    return z.segment(state_offset(k), state_size_);
  }
  Vector input_at(const Vector& z, int k) const {
    return z.segment(input_offset(k), m_);
  }

  Vector residuals(const Vector& z) const {
    std::vector<Scalar> r;
    r.reserve(static_cast<std::size_t>(k_ * (state_size_ + m_) + state_size_));
    const Scalar sqrt_dt = std::sqrt(dt_);
    for (int k = 0; k < k_; ++k) {
      const Vector predicted = rk4_step(plant_, state_at(z, k), input_at(z, k),
                                        k * dt_, dt_);
      const Vector defect = opt_.defect_weight * (state_at(z, k + 1) - predicted);
      for (Index i = 0; i < defect.size(); ++i) r.push_back(defect[i]);
      const Vector u = sqrt_dt * input_at(z, k);
      for (Index i = 0; i < u.size(); ++i) r.push_back(u[i]);
    }
    const Vector terminal = opt_.terminal_weight * (state_at(z, k_) - x_goal_);
    for (Index i = 0; i < terminal.size(); ++i) r.push_back(terminal[i]);
    if (!opt_.ignore_collisions) {
      for (int k = 1; k <= k_; ++k) {
        const Vector p = state_at(z, k).head(n_);
        for (const Vector& other : others_[k]) {
          const Scalar dist = cfg_.weighted_norm(other - p);
          const Scalar gap = margin_ - dist;
          r.push_back(gap > 0 ? opt_.collision_weight * gap : 0.0);
        }
      }
    }
    return Eigen::Map<Vector>(r.data(), static_cast<Index>(r.size()));
  }

  // Dense Jacobian by forward differences on the residual vector; the
  // problem sizes here keep this comfortably cheap.
  Matrix jacobian(const Vector& z, const Vector& r0) const {
    Matrix jac(r0.size(), z_size_);
    const Scalar h = 1e-6;
    Vector zp = z;
    for (Index col = 0; col < z_size_; ++col) {
      const Scalar step = h * std::max<Scalar>(1.0, std::abs(z[col]));
      zp[col] = z[col] + step;
      jac.col(col) = (residuals(zp) - r0) / step;
      zp[col] = z[col];
    }
    return jac;
  }

  Vector solve() {
    Vector z = initial_guess();
    Scalar lambda = opt_.levenberg;
    Vector r = residuals(z);
    for (int iteration = 0; iteration < opt_.gn_iterations; ++iteration) {
      const Matrix jac = jacobian(z, r);
      const Matrix jtj = jac.transpose() * jac;
      const Vector jtr = jac.transpose() * r;
      bool accepted = false;
      for (int attempt = 0; attempt < 8 && !accepted; ++attempt) {
        const Matrix damped =
            jtj + lambda * Matrix::Identity(z_size_, z_size_);
        const Vector step = damped.ldlt().solve(-jtr);
        const Vector z_new = z + step;
        const Vector r_new = residuals(z_new);
        if (r_new.squaredNorm() < r.squaredNorm()) {
          z = z_new;
          r = r_new;
          lambda = std::max(lambda / 3.0, 1e-12);
          accepted = true;
        } else {
          lambda *= 10.0;
        }
      }
      if (!accepted) break;
    }
    return z;
  }

 private:
  const AffinePlant& plant_;
  const PlannerOptions& opt_;
  const SafetyConfig& cfg_;
  Vector x0_, x_goal_;
  Scalar dt_;
  std::vector<std::vector<Vector>> others_;
  Scalar margin_;
  Index n_ = 0, m_ = 0, state_size_ = 0, z_size_ = 0;
  int k_ = 0;
};

}  // namespace

Scalar schedule_min_clearance(const TrajectorySchedule& schedule,
                              const std::vector<Vector>& obstacles,
                              const SafetyConfig& cfg) {
  Scalar min_h = std::numeric_limits<Scalar>::infinity();
  const int samples = 2 * (schedule.knots() - 1);
  for (int s = 0; s <= samples; ++s) {
    const Scalar t = schedule.t0 + 0.5 * schedule.dt * s;
    World world;
    world.time = t;
    for (int i = 0; i < schedule.n_agents; ++i) {
      const auto point = schedule.at(i, t);
      world.agents.emplace_back(point.p, point.v);
    }
    world.obstacles = obstacles;
    min_h = std::min(min_h, global_min_clearance(world, cfg));
  }
  return min_h;
}

TrajectorySchedule plan_global_reference(const Plant& plant, const World& initial,
                                         const std::vector<AgentState>& goals,
                                         Scalar horizon, const SafetyConfig& cfg,
                                         const PlannerOptions& options) {
  options.validate();
  initial.validate();
  if (goals.size() != initial.agents.size())
    throw ValidationError("plan_global_reference: one goal per agent required");
  const int n_agents = static_cast<int>(initial.agents.size());
  const Index n = plant.n();
  const int knots = options.knots;
  const Scalar dt = horizon / knots;
  const Scalar margin = cfg.inflated_radius() + options.collision_margin;

  // Current plans, seeded with straight lines; [agent][knot 0..K].
  std::vector<std::vector<Vector>> states(n_agents), inputs(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    const Vector x0 = pack_state(initial.agents[i].p, initial.agents[i].v);
    const Vector xg = pack_state(goals[i].p, goals[i].v);
    states[i].resize(knots + 1);
    inputs[i].assign(knots, Vector::Zero(plant.m()));
    for (int k = 0; k <= knots; ++k) {
      const Scalar w = static_cast<Scalar>(k) / knots;
      states[i][k] = (1.0 - w) * x0 + w * xg;
    }
  }

  const int sweeps = n_agents == 1 && initial.obstacles.empty() && !options.ignore_collisions
                         ? 1
                         : options.agent_sweeps;
  for (int sweep = 0; sweep < (options.ignore_collisions ? 1 : sweeps); ++sweep) {
    for (int i = 0; i < n_agents; ++i) {
      std::vector<std::vector<Vector>> others(knots + 1);
      for (int k = 0; k <= knots; ++k) {
        for (int j = 0; j < n_agents; ++j)
          if (j != i) others[k].push_back(states[j][k].head(n));
        for (const Vector& o : initial.obstacles) others[k].push_back(o);
      }
      AgentProblem problem(plant.affine, options, cfg,
                           pack_state(initial.agents[i].p, initial.agents[i].v),
                           pack_state(goals[i].p, goals[i].v), dt, std::move(others),
                           margin);
      const Vector z = problem.solve();
      for (int k = 1; k <= knots; ++k) states[i][k] = problem.state_at(z, k);
      for (int k = 0; k < knots; ++k) inputs[i][k] = problem.input_at(z, k);
    }
  }

  TrajectorySchedule schedule;
  schedule.t0 = initial.time;
  schedule.dt = dt;
  schedule.n_agents = n_agents;
  schedule.p.resize(n_agents);
  schedule.v.resize(n_agents);
  schedule.u.resize(n_agents);
  schedule.a.resize(n_agents);
  Scalar cost = 0.0;
  for (int i = 0; i < n_agents; ++i) {
    for (int k = 0; k <= knots; ++k) {
      const Vector p = states[i][k].head(n);
      const Vector v = states[i][k].tail(n);
      const Vector u = inputs[i][std::min(k, knots - 1)];
      schedule.p[i].push_back(p);
      schedule.v[i].push_back(v);
      schedule.u[i].push_back(u);
      schedule.a[i].push_back(plant.affine.acceleration(p, v, u, schedule.t0 + k * dt));
      if (k < knots) cost += inputs[i][k].squaredNorm() * dt;
    }
  }
  schedule.predicted_cost = cost;

  if (!options.ignore_collisions) {
    const Scalar min_h = schedule_min_clearance(schedule, initial.obstacles, cfg);
    if (!(min_h > 0))
      throw PlannerError("plan_global_reference: plan ends with min clearance " +
                         std::to_string(min_h));
    for (int i = 0; i < n_agents; ++i) {
      const Scalar miss = (schedule.p[i].back() - goals[i].p).norm();
      if (miss > options.terminal_tolerance)
        throw PlannerError("plan_global_reference: agent " + std::to_string(i) +
                           " misses its goal by " + std::to_string(miss));
    }
  }
  return schedule;
}

}  // namespace safetrack
