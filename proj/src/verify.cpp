#include <safetrack/verify.hpp>

#include <safetrack/barrier.hpp>
#include <safetrack/contraction.hpp>
#include <safetrack/dynamics.hpp>
#include <safetrack/halfspace.hpp>
#include <safetrack/riccati.hpp>
#include <safetrack/rng.hpp>
#include <safetrack/robust_filter.hpp>
#include <safetrack/safety_filter.hpp>
#include <safetrack/sim.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace safetrack {

namespace {

SafetyConfig default_cfg() {
  SafetyConfig cfg;
  cfg.r_s = 0.5;
  cfg.delta_r_s = 0.1;
  cfg.r_sen = 2.0;
  return cfg;
}

Scalar rel_error(const Vector& analytic, const Vector& reference) {
  return (analytic - reference).norm() / std::max<Scalar>(1.0, reference.norm());
}

// Random safe observation with every object comfortably inside the sensing
// shell, so finite-difference stencils never cross the set boundary.
Observation random_safe_observation(std::uint64_t k, const SafetyConfig& cfg,
                                    Index n) {
  Observation obs;
  obs.self_index = 0;
  obs.self.p = 0.3 * rng::normal_vector(rng::mix(k, 1), n);
  obs.self.v = rng::normal_vector(rng::mix(k, 2), n);
  obs.time = 0.0;
  const int n_agents = 1 + static_cast<int>(rng::uniform(rng::mix(k, 3)) * 3);
  const int n_obstacles = static_cast<int>(rng::uniform(rng::mix(k, 4)) * 3);
  int id = 1;
  for (int j = 0; j < n_agents + n_obstacles; ++j) {
    Vector offset;
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t kk = rng::key(k, 5, j, attempt);
      const Vector dir = rng::unit_vector(kk, n);
      const Scalar radius =
          rng::uniform(rng::mix(kk, 9), cfg.inflated_radius() + 0.25, cfg.r_sen - 0.25);
      offset = radius * dir;
      if (cfg.weighted_norm(offset) > cfg.inflated_radius() + 0.2) break;
      if (attempt > 200) throw Error("random_safe_observation: sampling stalled");
    }
    if (j < n_agents) {
      AgentState other;
      other.p = obs.self.p + offset;
      other.v = rng::normal_vector(rng::key(k, 6, j), n);
      obs.neighbor_agents.emplace_back(id++, other);
    } else {
      obs.neighbor_obstacles.emplace_back(id++, Vector(obs.self.p + offset));
    }
  }
  return obs;
}

Scalar psi_of(const Observation& obs, const SafetyConfig& cfg) {
  return eval_barrier(obs, cfg).psi;
}

}  // namespace

GradientCheck verify_gradients(int n_configs, std::uint64_t seed) {
  GradientCheck out;
  out.configs = n_configs;
  for (int config = 0; config < n_configs; ++config) {
    const std::uint64_t k = rng::key(seed, 0x6772ULL, config);
    const Index n = 2 + static_cast<Index>(rng::uniform(rng::mix(k, 0)) * 2);
    SafetyConfig cfg = default_cfg();
    if (rng::uniform(rng::mix(k, 100)) < 0.5) {
      Vector diag(n);
      for (Index i = 0; i < n; ++i)
        diag[i] = rng::uniform(rng::key(k, 101, i), 0.4, 1.0);
      cfg.xi = diag.asDiagonal();
    }
    const Observation obs = random_safe_observation(k, cfg, n);

    // Gradient against central differences of psi in the self position.
    const BarrierEval eval = eval_barrier(obs, cfg);
    Vector fd_grad(n);
    const Scalar h = 1e-6;
    for (Index c = 0; c < n; ++c) {
      Observation plus = obs, minus = obs;
      plus.self.p[c] += h;
      minus.self.p[c] -= h;
      fd_grad[c] = (psi_of(plus, cfg) - psi_of(minus, cfg)) / (2.0 * h);
    }
    out.worst_grad_rel = std::max(out.worst_grad_rel, rel_error(eval.grad_p, fd_grad));

    // Safe-velocity rate against a central difference along the flow.
    const Scalar k_p = rng::uniform(rng::mix(k, 200), 0.5, 2.0);
    const Vector analytic_rate = safe_velocity_rate(obs, cfg, k_p);
    const Scalar dt = 1e-6;
    auto shifted = [&](Scalar delta) {
      Observation moved = obs;
      moved.self.p += delta * obs.self.v;
      for (auto& [idx, st] : moved.neighbor_agents) st.p += delta * st.v;
      return safe_velocity(moved, cfg, k_p);
    };
    const Vector fd_rate = (shifted(dt) - shifted(-dt)) / (2.0 * dt);
    out.worst_rate_rel = std::max(out.worst_rate_rel, rel_error(analytic_rate, fd_rate));
  }
  return out;
}

KktCheck verify_kkt(int instances, std::uint64_t seed) {
  KktCheck out;
  out.instances = instances;
  const SafetyConfig cfg = default_cfg();
  FilterGains gains;
  gains.k_p = 1.2;
  gains.k_v = 0.8;

  auto record = [&](const Vector& filtered, const Vector& u_bar, const Vector& w,
                    const Vector& u_nominal) {
    const Vector oracle = qp_oracle_halfspace(u_nominal, u_bar, w);
    out.worst_deviation =
        std::max(out.worst_deviation, (filtered - oracle).lpNorm<Eigen::Infinity>());
  };

  const int per_leg = instances / 4;
  // Plain random instances across dimensions, including vacuous directions.
  for (int i = 0; i < per_leg; ++i) {
    const std::uint64_t k = rng::key(seed, 1, i);
    const Index m = 1 + static_cast<Index>(rng::uniform(rng::mix(k, 0)) * 6);
    const Vector u_nominal = 3.0 * rng::normal_vector(rng::mix(k, 1), m);
    const Vector u_bar = 3.0 * rng::normal_vector(rng::mix(k, 2), m);
    Vector w = rng::normal_vector(rng::mix(k, 3), m);
    if (i % 17 == 0) w.setZero();
    record(project_input(u_nominal, u_bar, w).u, u_bar, w, u_nominal);
  }
  // Lagrangian filter on a point-mass world.
  const LagrangianPlant unit2 = make_unit_mass_plant(2);
  for (int i = 0; i < per_leg; ++i) {
    const std::uint64_t k = rng::key(seed, 2, i);
    const Observation obs = random_safe_observation(k, cfg, 2);
    const Vector u_nominal = 2.0 * rng::normal_vector(rng::mix(k, 7), 2);
    const SafetyFilterOutput fo = safety_filter_lagrangian(
        u_nominal, unit2, obs, neighbor_velocities_of(obs), cfg, gains);
    record(fo.u, fo.u_bar, fo.direction, u_nominal);
  }
  // General filter on the nonlinear benchmark with the pointwise metric.
  const AffinePlant benchmark = make_nonlinear_example_plant();
  for (int i = 0; i < per_leg; ++i) {
    const std::uint64_t k = rng::key(seed, 3, i);
    const Observation obs = random_safe_observation(k, cfg, 2);
    const Vector v_d = safe_velocity(obs, cfg, gains.k_p);
    const Matrix a_d = sdc_factorize(benchmark, obs.self.p, obs.self.v, v_d, 0.0);
    const Matrix metric = metric_pointwise(a_d, Matrix::Identity(2, 2),
                                           Matrix::Identity(2, 2), gains.k_v,
                                           Matrix::Identity(2, 2));
    const Vector u_nominal = 2.0 * rng::normal_vector(rng::mix(k, 7), 2);
    const SafetyFilterOutput fo = safety_filter_general(
        u_nominal, benchmark, obs, neighbor_velocities_of(obs), cfg, gains, metric);
    record(fo.u, fo.u_bar, fo.direction, u_nominal);
  }
  // Tracking filter around random target points.
  const LagrangianPlant unit3 = make_unit_mass_plant(3);
  RobustGains robust;
  robust.k_r = 1.5;
  for (int i = 0; i < instances - 3 * per_leg; ++i) {
    const std::uint64_t k = rng::key(seed, 4, i);
    AgentState state(rng::normal_vector(rng::mix(k, 1), 3),
                     rng::normal_vector(rng::mix(k, 2), 3));
    TrajectorySchedule::Point target;
    target.p = rng::normal_vector(rng::mix(k, 3), 3);
    target.v = rng::normal_vector(rng::mix(k, 4), 3);
    target.u = rng::normal_vector(rng::mix(k, 5), 3);
    target.a = rng::normal_vector(rng::mix(k, 6), 3);
    const SafetyFilterOutput fo = robust_filter(target.u, target, state, unit3, robust);
    record(fo.u, fo.u_bar, fo.direction, target.u);
  }
  return out;
}

namespace {

std::vector<std::set<int>> neighbor_sets(const World& world, const SafetyConfig& cfg) {
  std::vector<std::set<int>> sets(world.agents.size());
  for (int i = 0; i < static_cast<int>(world.agents.size()); ++i) {
    const Observation obs = observe(world, i, cfg);
    for (const auto& [idx, st] : obs.neighbor_agents) sets[i].insert(idx);
    for (const auto& [idx, pos] : obs.neighbor_obstacles) sets[i].insert(1000 + idx);
  }
  return sets;
}

struct LyapunovLeg {
  Scalar cushion = 0.0;
  Scalar form_gap = 0.0;
};

// Disturbance-free filtered loop on the HCW plant; finite-difference rate of
// V = k_p psi(X) + sum |e_v|^2_M / 2 against the certified decrease.
LyapunovLeg lagrangian_leg(Scalar dt, UBarVariant variant) {
  const Scalar n_bar = 0.2;
  const LagrangianPlant lag = make_leo_hcw_plant(n_bar);
  Plant plant;
  plant.key = "leo_hcw";
  plant.lagrangian = lag;
  plant.affine = to_affine(lag);
  SafetyConfig cfg;
  cfg.r_s = 0.3;
  cfg.delta_r_s = 0.1;
  cfg.r_sen = 2.0;
  FilterGains gains;
  gains.k_p = 0.8;
  gains.k_v = 0.7;
  gains.u_bar_variant = variant;

  World world;
  world.time = 0.0;
  Vector p0(3), p1(3), obst(3);
  p0 << -1.2, 0.05, 0.0;
  p1 << 1.2, -0.05, 0.0;
  obst << 0.0, 0.8, 0.0;
  world.agents = {AgentState(p0, Vector::Zero(3)), AgentState(p1, Vector::Zero(3))};
  world.obstacles = {obst};
  const std::vector<Vector> goals = {p1, p0};

  const int substeps = 6;
  const int ticks = static_cast<int>(std::round(3.0 / dt));
  DisturbanceSpec none;
  LyapunovLeg leg;

  auto lyapunov = [&](const World& w) {
    Scalar value = gains.k_p * global_log_barrier(w, cfg);
    for (int i = 0; i < 2; ++i) {
      const Observation obs = observe(w, i, cfg);
      const Vector e_v = obs.self.v - safe_velocity(obs, cfg, gains.k_p);
      value += 0.5 * e_v.dot(lag.mass(obs.self.p) * e_v);
    }
    return value;
  };

  World world_k = world;
  for (int tick = 0; tick < ticks; ++tick) {
    const auto sets_before = neighbor_sets(world_k, cfg);
    const Scalar v_now = lyapunov(world_k);
    Scalar bound = 0.0;
    std::vector<Vector> inputs;
    for (int i = 0; i < 2; ++i) {
      const Observation obs = observe(world_k, i, cfg);
      const BarrierEval barrier = eval_barrier(obs, cfg);
      const Vector e_v = obs.self.v + gains.k_p * barrier.grad_p;
      bound += -gains.k_p * gains.k_p * barrier.grad_p.squaredNorm() -
               gains.k_v * e_v.dot(lag.mass(obs.self.p) * e_v);
      const Vector u_learned =
          1.2 * (goals[i] - obs.self.p) - 1.0 * obs.self.v;
      inputs.push_back(safety_filter_lagrangian(u_learned, lag, obs,
                                                neighbor_velocities_of(obs), cfg, gains)
                           .u);
    }
    World world_next = world_k;
    for (int sub = 0; sub < substeps; ++sub)
      world_next = em_step(world_next, inputs, plant, none, dt / substeps, 0);
    if (neighbor_sets(world_next, cfg) == sets_before) {
      const Scalar rate = (lyapunov(world_next) - v_now) / dt;
      leg.cushion = std::max(leg.cushion, rate - bound);
    }
    world_k = world_next;
  }
  return leg;
}

// Same check for the general filter on the nonlinear benchmark.
// With plain_psi the Lyapunov function is psi(X) + sum E, otherwise
// k_p psi(X) + sum E.
LyapunovLeg general_leg(Scalar dt, Scalar k_p, bool plain_psi) {
  const AffinePlant benchmark = make_nonlinear_example_plant();
  Plant plant;
  plant.key = "nonlinear_example";
  plant.affine = benchmark;
  SafetyConfig cfg;
  cfg.r_s = 0.25;
  cfg.delta_r_s = 0.1;
  cfg.r_sen = 2.0;
  FilterGains gains;
  gains.k_p = k_p;
  gains.k_v = 0.5;

  World world;
  world.time = 0.0;
  Vector p0(2), o1(2), o2(2);
  p0 << 1.0, 1.0;
  o1 << 0.45, 0.55;
  o2 << 0.0, 1.1;
  world.agents = {AgentState(p0, Vector::Ones(2))};
  world.obstacles = {o1, o2};

  const Matrix R = Matrix::Identity(2, 2);
  const Matrix Q = Matrix::Identity(2, 2);
  auto metric_of = [&](const Observation& obs) {
    const Vector v_d = safe_velocity(obs, cfg, gains.k_p);
    const Matrix a_d = sdc_factorize(benchmark, obs.self.p, obs.self.v, v_d, obs.time);
    return metric_pointwise(a_d, Matrix::Identity(2, 2), R, gains.k_v, Q);
  };
  auto lyapunov = [&](const World& w) {
    const Observation obs = observe(w, 0, cfg);
    const Matrix metric = metric_of(obs);
    const Vector v_d = safe_velocity(obs, cfg, gains.k_p);
    const Scalar psi_weight = plain_psi ? 1.0 : gains.k_p;
    return psi_weight * global_log_barrier(w, cfg) +
           incremental_energy(obs.self.v, v_d, metric);
  };

  const int substeps = 6;
  const int ticks = static_cast<int>(std::round(3.0 / dt));
  DisturbanceSpec none;
  LyapunovLeg leg;
  World world_k = world;
  for (int tick = 0; tick < ticks; ++tick) {
    const auto sets_before = neighbor_sets(world_k, cfg);
    const Scalar v_now = lyapunov(world_k);
    const Observation obs = observe(world_k, 0, cfg);
    const BarrierEval barrier = eval_barrier(obs, cfg);
    const Matrix metric = metric_of(obs);
    const Vector v_d = -gains.k_p * barrier.grad_p;
    const Scalar energy = incremental_energy(obs.self.v, v_d, metric);
    const Scalar bound = -gains.k_p * gains.k_p * barrier.grad_p.squaredNorm() -
                         gains.k_v * energy;
    const Vector u_learned = -1.0 * obs.self.p - 1.2 * obs.self.v;
    const Vector u = safety_filter_general(u_learned, benchmark, obs,
                                           neighbor_velocities_of(obs), cfg, gains,
                                           metric)
                         .u;
    World world_next = world_k;
    for (int sub = 0; sub < substeps; ++sub)
      world_next = em_step(world_next, {u}, plant, none, dt / substeps, 0);
    if (neighbor_sets(world_next, cfg) == sets_before) {
      const Scalar rate = (lyapunov(world_next) - v_now) / dt;
      leg.cushion = std::max(leg.cushion, rate - bound);
      leg.form_gap = std::max(
          leg.form_gap, std::abs((1.0 - gains.k_p)) *
                            std::abs(global_log_barrier(world_next, cfg) -
                                     global_log_barrier(world_k, cfg)) /
                            dt);
    }
    world_k = world_next;
  }
  return leg;
}

}  // namespace

LyapunovCheck verify_lyapunov(std::uint64_t seed) {
  (void)seed;
  LyapunovCheck out;
  const Scalar base_dt = 0.02;
  for (int level = 0; level < 3; ++level) {
    const Scalar dt = base_dt / (1 << level);
    Scalar lag_cushion = 0.0;
    for (UBarVariant variant : {UBarVariant::kRevised, UBarVariant::kDraft})
      lag_cushion = std::max(lag_cushion, lagrangian_leg(dt, variant).cushion);
    out.cushion_lagrangian[level] = lag_cushion;
    out.cushion_general[level] = general_leg(dt, 1.0, true).cushion;
  }
  out.general_form_gap = general_leg(base_dt, 1.6, true).form_gap;
  return out;
}

ContractionCheck verify_contraction(std::uint64_t seed) {
  (void)seed;
  ContractionCheck out;

  // LTI identity: constant metric, residual exactly -min eig(Q).
  AffinePlant lti;
  lti.dim_state = 2;
  lti.dim_input = 2;
  Matrix a(2, 2);
  a << -1.0, 0.3, 0.0, -0.8;
  lti.drift = [a](const Vector&, const Vector& v, Scalar) -> Vector { return a * v; };
  lti.actuation = [](const Vector&, const Vector&, Scalar) -> Matrix {
    return Matrix::Identity(2, 2);
  };
  lti.drift_jacobian_v = [a](const Vector&, const Vector&, Scalar) -> Matrix {
    return a;
  };
  FilterGains gains;
  gains.k_v = 0.5;
  gains.q_margin = 1.0;
  std::vector<TrajectorySample> lti_traj;
  Vector v = Vector::Ones(2);
  for (int k = 0; k < 20; ++k) {
    TrajectorySample s;
    s.t = 1e-3 * k;
    s.p = Vector::Zero(2);
    s.v = v;
    s.v_d = Vector::Zero(2);
    lti_traj.push_back(s);
    v += 1e-3 * (a * v);
  }
  const Scalar lti_residual = verify_contraction_along_trajectory(lti_traj, lti, gains);
  out.lti_identity_error = std::abs(lti_residual - (-gains.q_margin));

  // Closed-loop trajectory of the nonlinear benchmark under the general
  // safety filter, sampled at 1 ms.
  const AffinePlant benchmark = make_nonlinear_example_plant();
  Plant plant;
  plant.key = "nonlinear_example";
  plant.affine = benchmark;
  SafetyConfig cfg = default_cfg();
  cfg.r_s = 0.25;
  FilterGains loop_gains;
  loop_gains.k_p = 1.0;
  loop_gains.k_v = 0.5;
  World world;
  Vector p0(2), o1(2);
  p0 << 1.0, 1.0;
  o1 << 0.5, 0.5;
  world.agents = {AgentState(p0, Vector::Ones(2))};
  world.obstacles = {o1};
  DisturbanceSpec none;
  std::vector<TrajectorySample> traj;
  const Scalar dt = 1e-3;
  for (int k = 0; k < 3000; ++k) {
    const Observation obs = observe(world, 0, cfg);
    const Vector v_d = safe_velocity(obs, cfg, loop_gains.k_p);
    TrajectorySample s;
    s.t = world.time;
    s.p = obs.self.p;
    s.v = obs.self.v;
    s.v_d = v_d;
    traj.push_back(s);
    const Matrix a_d = sdc_factorize(benchmark, obs.self.p, obs.self.v, v_d, world.time);
    const Matrix metric =
        metric_pointwise(a_d, Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                         loop_gains.k_v, Matrix::Identity(2, 2));
    const Vector u_learned = -1.0 * obs.self.p - 1.2 * obs.self.v;
    const Vector u = safety_filter_general(u_learned, benchmark, obs,
                                           neighbor_velocities_of(obs), cfg,
                                           loop_gains, metric)
                         .u;
    world = em_step(world, {u}, plant, none, dt, 0);
  }
  out.residual = verify_contraction_along_trajectory(traj, benchmark, loop_gains);

  // Claiming a much faster decay than the metric was built for must be
  // rejected with a positive residual.
  out.broken_gain_residual =
      verify_contraction_along_trajectory(traj, benchmark, loop_gains, 60.0);
  return out;
}

EnvelopeCheck verify_envelope(int paths, std::uint64_t seed, Scalar k_r, Scalar d_bar,
                              Scalar gamma_bar) {
  const Index n = 2;
  const LagrangianPlant lag = make_unit_mass_plant(n);
  Plant plant;
  plant.key = "unit_mass";
  plant.lagrangian = lag;
  plant.affine = to_affine(lag);

  RobustGains gains;
  gains.k_r = k_r;
  gains.epsilon_d = 1.0;

  DisturbanceSpec disturbance;
  disturbance.d_bar = d_bar;
  disturbance.gamma_bar = gamma_bar;
  disturbance.profile = DisturbanceSpec::Profile::kConstantDirection;

  const Scalar horizon = 8.0;
  const Scalar dt = 0.02;
  const int substeps = 2;
  const int ticks = static_cast<int>(horizon / dt);

  // Synthetic consistent target: a circle at unit radius, u_d = vdot_d for
  // the point mass.
  const Scalar omega = 0.5;
  auto target_point = [&](Scalar t) {
    TrajectorySchedule::Point point;
    point.p = Vector(n);
    point.v = Vector(n);
    point.a = Vector(n);
    point.p << std::cos(omega * t), std::sin(omega * t);
    point.v << -omega * std::sin(omega * t), omega * std::cos(omega * t);
    point.a << -omega * omega * std::cos(omega * t), -omega * omega * std::sin(omega * t);
    point.u = point.a;
    return point;
  };

  Vector s0(n);
  s0 << 0.35, -0.35;
  const ErrorEnvelope envelope =
      error_envelope(gains, unit_mass_bounds(gamma_bar), disturbance, s0.norm(), n);
  ErrorEnvelope sized = envelope;
  sized.D_s = margin_from_envelope(envelope, 0.9, horizon);

  EnvelopeCheck out;
  out.d_s = sized.D_s;
  out.times.resize(ticks, 0.0);
  out.mean_s.assign(ticks, 0.0);
  out.bound.resize(ticks);
  out.exceed_freq.assign(ticks, 0.0);
  out.markov_bound.resize(ticks);

  for (int path = 0; path < paths; ++path) {
    DisturbanceSpec path_disturbance = disturbance;
    path_disturbance.seed = rng::key(seed, path, 0x656eULL);
    World world;
    world.time = 0.0;
    const auto start = target_point(0.0);
    world.agents = {AgentState(start.p, start.v + s0)};
    for (int tick = 0; tick < ticks; ++tick) {
      const Scalar t = world.time;
      const auto point = target_point(t);
      const Vector e_p = world.agents[0].p - point.p;
      const Vector e_v = world.agents[0].v - point.v;
      const Scalar s_norm = (e_v + e_p).norm();
      out.times[tick] = t;
      out.mean_s[tick] += s_norm / paths;
      if (e_p.norm() > sized.D_s) out.exceed_freq[tick] += 1.0 / paths;
      const Vector u = robust_filter(point.u, point, world.agents[0], lag, gains).u;
      for (int sub = 0; sub < substeps; ++sub) {
        const std::uint64_t step_key =
            rng::key(seed, path, tick * substeps + sub, 0x7377ULL);
        world = em_step(world, {u}, plant, path_disturbance, dt / substeps, step_key);
      }
    }
  }

  Scalar tail = 0.0;
  int tail_count = 0;
  for (int tick = 0; tick < ticks; ++tick) {
    const Scalar t = out.times[tick];
    out.bound[tick] = sized.mean_bound(t);
    const Scalar q = std::min<Scalar>(1.0, sized.expected_deviation(t) / sized.D_s);
    const Scalar sigma = std::sqrt(std::max<Scalar>(q * (1 - q), 0.0) / paths);
    out.markov_bound[tick] = q + 3.0 * sigma;
    out.worst_ratio = std::max(out.worst_ratio, out.mean_s[tick] / out.bound[tick]);
    if (out.exceed_freq[tick] > out.markov_bound[tick] + 1e-12) out.markov_ok = false;
    if (tick >= (3 * ticks) / 4) {
      tail += out.mean_s[tick];
      ++tail_count;
    }
  }
  out.steady_mean_s = tail / std::max(1, tail_count);
  return out;
}

void write_envelope_csv(const std::string& path, const EnvelopeCheck& check) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  out << "# margin D_s " << check.d_s << "\n";
  out << "t,mean_s,bound,exceed_freq,markov_bound\n";
  for (std::size_t k = 0; k < check.times.size(); ++k)
    out << check.times[k] << "," << check.mean_s[k] << "," << check.bound[k] << ","
        << check.exceed_freq[k] << "," << check.markov_bound[k] << "\n";
}

}  // namespace safetrack
