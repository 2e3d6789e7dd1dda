#include <safetrack/sim.hpp>

#include <safetrack/barrier.hpp>
#include <safetrack/contraction.hpp>
#include <safetrack/rng.hpp>
#include <safetrack/safety_filter.hpp>

#include <Eigen/Cholesky>

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

namespace safetrack {

World em_step(const World& world, const std::vector<Vector>& inputs,
              const Plant& plant, const DisturbanceSpec& disturbance, Scalar dt,
              std::uint64_t step_key) {
  if (!(dt > 0)) throw ValidationError("em_step: dt must be > 0");
  const Index n = plant.n();
  const Scalar sqrt_dt = std::sqrt(dt);
  World next = world;
  const Matrix gamma = diffusion_matrix(disturbance, n);
  for (int i = 0; i < static_cast<int>(world.agents.size()); ++i) {
    const AgentState& agent = world.agents[i];
    const Vector d = disturbance_value(disturbance, world, i, world.time);
    Vector accel;
    Vector noise = Vector::Zero(n);
    if (disturbance.gamma_bar > 0) {
      Vector xi(n);
      for (Index c = 0; c < n; ++c)
        xi[c] = rng::normal(rng::key(step_key, i, c));
      noise = gamma * xi * sqrt_dt;
    }
    if (plant.is_lagrangian()) {
      const LagrangianPlant& lag = *plant.lagrangian;
      accel = lag.acceleration(agent.p, agent.v, inputs[i] + d);
      if (disturbance.gamma_bar > 0)
        noise = lag.mass(agent.p).llt().solve(noise).eval();
    } else {
      accel = plant.affine.acceleration(agent.p, agent.v, inputs[i], world.time) + d;
    }
    next.agents[i].v = agent.v + accel * dt + noise;
    next.agents[i].p = agent.p + next.agents[i].v * dt;
    if (!next.agents[i].p.allFinite() || !next.agents[i].v.allFinite())
      throw NonFiniteStateError("em_step: agent " + std::to_string(i) +
                                " left the finite range at t=" +
                                std::to_string(world.time));
  }
  next.time = world.time + dt;
  return next;
}

namespace {

// Per-run policy evaluation; owns the reference schedule and, in tracking
// mode, the current safe target trajectory.
class PolicyRuntime {
 public:
  PolicyRuntime(const ScenarioSpec& spec, const Plant& plant,
                TrajectorySchedule reference, std::vector<AgentState> goals,
                std::uint64_t run_key)
      : spec_(spec),
        plant_(plant),
        reference_(std::move(reference)),
        goals_(std::move(goals)),
        run_key_(run_key) {}

  const TrajectorySchedule& reference() const { return reference_; }
  bool has_target() const { return target_.schedule.n_agents > 0; }
  const SafeTargetTrajectory& target() const { return target_; }

  std::vector<Vector> tick_inputs(const World& world, int tick, RunResult& log) {
    const bool lagrangian_path = plant_.is_lagrangian() && !spec_.force_general_path;
    const Scalar t = world.time;
    std::vector<Vector> inputs(world.agents.size());

    if (spec_.policy.kind == PolicyKind::kRobustTracking) {
      if (tick % spec_.gains.replan_interval == 0 || !has_target()) {
        const Scalar remaining = std::max(spec_.horizon - t, spec_.dt);
        target_ = rollout_safe_target(world, plant_, spec_, reference_,
                                      remaining + spec_.dt, run_key_);
      }
    }

    for (int i = 0; i < static_cast<int>(world.agents.size()); ++i) {
      switch (spec_.policy.kind) {
        case PolicyKind::kGlobalReference: {
          inputs[i] = t <= reference_.end_time() ? reference_.at(i, t).u
                                                 : Vector::Zero(plant_.m());
          break;
        }
        case PolicyKind::kLearned: {
          const Observation obs = observe(world, i, spec_.safety);
          inputs[i] = emulated_policy(obs, reference_, i, spec_.policy, policy_seed());
          break;
        }
        case PolicyKind::kSafetyFilter: {
          const Observation obs = observe(world, i, spec_.safety);
          const Vector u_learned =
              emulated_policy(obs, reference_, i, spec_.policy, policy_seed());
          inputs[i] = safe_input(obs, u_learned, lagrangian_path, log);
          break;
        }
        case PolicyKind::kRobustTracking: {
          const auto point = target_.schedule.at(i, t);
          inputs[i] = tracking_input(world.agents[i], point, t, lagrangian_path);
          break;
        }
        case PolicyKind::kClfCbfQp: {
          const Observation obs = observe(world, i, spec_.safety);
          const Vector u_learned =
              emulated_policy(obs, reference_, i, spec_.policy, policy_seed());
          const ClfCbfResult qp = clf_cbf_policy(obs, plant_, reference_, i, u_learned,
                                                 spec_.policy.qp, spec_.safety);
          if (qp.infeasible) ++log.qp_infeasible_count;
          inputs[i] = qp.u;
          break;
        }
      }
    }
    return inputs;
  }

  std::uint64_t policy_seed() const { return rng::mix(run_key_, 0x706cULL); }

  /// Safety projection with the not-safe fallback: past a barrier violation
  /// the raw policy input is applied so post-violation behavior stays
  /// observable.
  Vector safe_input(const Observation& obs, const Vector& u_learned,
                    bool lagrangian_path, RunResult& log) {
    try {
      if (lagrangian_path) {
        return safety_filter_lagrangian(u_learned, *plant_.lagrangian, obs,
                                        neighbor_velocities_of(obs), spec_.safety,
                                        spec_.gains)
            .u;
      }
      const Matrix metric = metric_at(obs);
      if (!is_fully_actuated(plant_.affine.actuation(obs.self.p, obs.self.v, obs.time)))
        ++log.assumption_violations;
      return safety_filter_general(u_learned, plant_.affine, obs,
                                   neighbor_velocities_of(obs), spec_.safety,
                                   spec_.gains, metric)
          .u;
    } catch (const NotSafeError&) {
      log.not_safe_event = true;
      return u_learned;
    }
  }

  Vector tracking_input(const AgentState& state, const TrajectorySchedule::Point& point,
                        Scalar t, bool lagrangian_path) {
    if (lagrangian_path)
      return robust_filter(point.u, point, state, *plant_.lagrangian,
                           spec_.gains.robust)
          .u;
    const Matrix lambda = spec_.gains.robust.lambda_or_identity(plant_.n());
    const Vector v_r = point.v - lambda * (state.p - point.p);
    const Matrix a_r = sdc_factorize(plant_.affine, state.p, state.v, v_r, t);
    const Matrix metric = metric_pointwise(
        a_r, plant_.affine.actuation(state.p, state.v, t),
        spec_.gains.r_or_identity(plant_.m()), spec_.gains.k_v,
        spec_.gains.q_margin * Matrix::Identity(plant_.n(), plant_.n()));
    return robust_filter_general(point.u, point, state, plant_.affine,
                                 spec_.gains.robust, metric, t)
        .u;
  }

  Matrix metric_at(const Observation& obs) {
    const BarrierEval barrier = eval_barrier(obs, spec_.safety);
    const Vector v_d = -spec_.gains.k_p * barrier.grad_p;
    const Matrix a_d = sdc_factorize(plant_.affine, obs.self.p, obs.self.v, v_d, obs.time);
    return metric_pointwise(
        a_d, plant_.affine.actuation(obs.self.p, obs.self.v, obs.time),
        spec_.gains.r_or_identity(plant_.m()), spec_.gains.k_v,
        spec_.gains.q_margin * Matrix::Identity(plant_.n(), plant_.n()));
  }

 private:
  const ScenarioSpec& spec_;
  const Plant& plant_;
  TrajectorySchedule reference_;
  SafeTargetTrajectory target_;
  std::vector<AgentState> goals_;
  std::uint64_t run_key_;
};

DisturbanceSpec run_disturbance(const ScenarioSpec& spec, std::uint64_t run_index) {
  DisturbanceSpec d = spec.disturbance;
  d.seed = rng::key(spec.seed, run_index, d.seed);
  return d;
}

}  // namespace

SafeTargetTrajectory rollout_safe_target(const World& start, const Plant& plant,
                                         const ScenarioSpec& spec,
                                         const TrajectorySchedule& reference,
                                         Scalar duration, std::uint64_t policy_seed) {
  const bool lagrangian_path = plant.is_lagrangian() && !spec.force_general_path;
  const int ticks = std::max(2, static_cast<int>(std::ceil(duration / spec.dt)));
  const Index n = plant.n();
  const Scalar dt_sub = spec.dt / spec.substeps;
  DisturbanceSpec no_disturbance;  // d = 0, gamma = 0

  SafeTargetTrajectory target;
  TrajectorySchedule& sched = target.schedule;
  sched.t0 = start.time;
  sched.dt = spec.dt;
  sched.n_agents = static_cast<int>(start.agents.size());
  sched.p.resize(sched.n_agents);
  sched.v.resize(sched.n_agents);
  sched.u.resize(sched.n_agents);
  sched.a.resize(sched.n_agents);
  target.min_clearance = std::numeric_limits<Scalar>::infinity();

  World world = start;
  RunResult scratch;
  for (int tick = 0; tick <= ticks; ++tick) {
    std::vector<Vector> inputs(world.agents.size(), Vector::Zero(plant.m()));
    for (int i = 0; i < sched.n_agents; ++i) {
      const Observation obs = observe(world, i, spec.safety);
      Vector u_learned = emulated_policy(obs, reference, i, spec.policy, policy_seed);
      Vector u = u_learned;
      try {
        if (lagrangian_path) {
          u = safety_filter_lagrangian(u_learned, *plant.lagrangian, obs,
                                       neighbor_velocities_of(obs), spec.safety,
                                       spec.gains)
                  .u;
        } else {
          const BarrierEval barrier = eval_barrier(obs, spec.safety);
          const Vector v_d = -spec.gains.k_p * barrier.grad_p;
          const Matrix a_d =
              sdc_factorize(plant.affine, obs.self.p, obs.self.v, v_d, obs.time);
          const Matrix metric = metric_pointwise(
              a_d, plant.affine.actuation(obs.self.p, obs.self.v, obs.time),
              spec.gains.r_or_identity(plant.m()), spec.gains.k_v,
              spec.gains.q_margin * Matrix::Identity(n, n));
          u = safety_filter_general(u_learned, plant.affine, obs,
                                    neighbor_velocities_of(obs), spec.safety,
                                    spec.gains, metric)
                  .u;
        }
      } catch (const NotSafeError&) {
        u = u_learned;
      }
      inputs[i] = u;
      sched.p[i].push_back(world.agents[i].p);
      sched.v[i].push_back(world.agents[i].v);
      sched.u[i].push_back(u);
      if (plant.is_lagrangian()) {
        sched.a[i].push_back(
            plant.lagrangian->acceleration(world.agents[i].p, world.agents[i].v, u));
      } else {
        sched.a[i].push_back(
            plant.affine.acceleration(world.agents[i].p, world.agents[i].v, u, world.time));
      }
    }
    target.min_clearance =
        std::min(target.min_clearance, global_min_clearance(world, spec.safety));
    if (tick == ticks) break;
    for (int sub = 0; sub < spec.substeps; ++sub)
      world = em_step(world, inputs, plant, no_disturbance, dt_sub, 0);
  }
  return target;
}

RunResult run_scenario(const ScenarioSpec& spec, std::uint64_t run_index) {
  spec.validate();
  const Plant plant = make_plant(spec.plant_key, spec.plant_params);
  const RunSetup setup = build_run_setup(spec, run_index);
  if (!(global_min_clearance(setup.world, spec.safety) > 0) &&
      !(setup.world.agents.size() == 1 && setup.world.obstacles.empty()))
    throw ValidationError("initial configuration is not safe (min clearance <= 0)");

  const std::uint64_t run_key = rng::key(spec.seed, run_index, 0x72756eULL);
  RunResult result;
  result.rng_seed = run_key;

  // Reference plan for the emulated policy and baselines.
  std::vector<AgentState> goals = setup.goals;
  TrajectorySchedule reference =
      plan_global_reference(plant, setup.world, goals, spec.horizon, spec.safety,
                            spec.planner);

  PolicyRuntime runtime(spec, plant, reference, goals, run_key);
  const DisturbanceSpec disturbance = run_disturbance(spec, run_index);
  const int ticks = static_cast<int>(std::round(spec.horizon / spec.dt));
  const Scalar dt_sub = spec.dt / spec.substeps;
  const bool tracking_mode = spec.policy.kind == PolicyKind::kRobustTracking;

  World world = setup.world;
  for (int tick = 0; tick < ticks; ++tick) {
    result.times.push_back(world.time);
    result.states.push_back(world.agents);
    std::vector<Scalar> per_agent;
    for (int i = 0; i < spec.n_agents; ++i) {
      const Observation obs = observe(world, i, spec.safety);
      Scalar agent_min = std::numeric_limits<Scalar>::infinity();
      for (const auto& [idx, st] : obs.neighbor_agents)
        agent_min = std::min(agent_min, clearance(st.p - obs.self.p, spec.safety));
      for (const auto& [idx, pos] : obs.neighbor_obstacles)
        agent_min = std::min(agent_min, clearance(pos - obs.self.p, spec.safety));
      per_agent.push_back(agent_min);
    }
    result.agent_min_h.push_back(per_agent);

    const std::vector<Vector> inputs = runtime.tick_inputs(world, tick, result);
    result.inputs.push_back(inputs);
    for (const Vector& u : inputs) result.control_effort += u.squaredNorm() * spec.dt;

    if (tracking_mode) {
      Scalar err = 0.0;
      for (int i = 0; i < spec.n_agents; ++i)
        err += (world.agents[i].p - runtime.target().schedule.at(i, world.time).p).norm();
      result.tracking_error.push_back(err / spec.n_agents);
    }

    Scalar tick_min_h = global_min_clearance(world, spec.safety);
    for (int sub = 0; sub < spec.substeps; ++sub) {
      const std::uint64_t step_key =
          rng::key(result.rng_seed, 0x7374ULL, tick * spec.substeps + sub);
      world = em_step(world, inputs, plant, disturbance, dt_sub, step_key);
      tick_min_h = std::min(tick_min_h, global_min_clearance(world, spec.safety));
    }
    result.min_h.push_back(tick_min_h);
    if (tick_min_h < 0) result.collided = true;
  }
  result.times.push_back(world.time);
  result.states.push_back(world.agents);

  Scalar worst_goal = 0.0;
  for (int i = 0; i < spec.n_agents; ++i)
    worst_goal = std::max(worst_goal, (world.agents[i].p - goals[i].p).norm());
  result.final_goal_distance = worst_goal;
  result.success = !result.collided && worst_goal <= spec.goal_tolerance;
  return result;
}

Aggregate monte_carlo(const ScenarioSpec& spec, int n_runs, int workers) {
  if (n_runs < 1) throw ValidationError("monte_carlo: n_runs must be >= 1");
  std::vector<RunResult> results(n_runs);
  workers = std::max(1, std::min(workers, n_runs));
  if (workers == 1) {
    for (int run = 0; run < n_runs; ++run) results[run] = run_scenario(spec, run);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int run = next.fetch_add(1); run < n_runs; run = next.fetch_add(1))
            results[run] = run_scenario(spec, run);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Aggregate agg;
  agg.n_runs = n_runs;
  int successes = 0;
  Scalar effort = 0.0;
  Scalar min_h_sum = 0.0;
  agg.worst_min_h = std::numeric_limits<Scalar>::infinity();
  std::size_t tick_count = 0;
  for (const RunResult& r : results) tick_count = std::max(tick_count, r.min_h.size());
  agg.mean_tracking_error.assign(
      results.front().tracking_error.empty() ? 0 : tick_count, 0.0);
  std::vector<int> tracking_counts(agg.mean_tracking_error.size(), 0);
  for (const RunResult& r : results) {
    successes += r.success ? 1 : 0;
    agg.collisions += r.collided ? 1 : 0;
    effort += r.control_effort;
    const Scalar run_min =
        r.min_h.empty() ? std::numeric_limits<Scalar>::infinity()
                        : *std::min_element(r.min_h.begin(), r.min_h.end());
    agg.run_min_h.push_back(run_min);
    agg.run_effort.push_back(r.control_effort);
    Scalar avg = 0.0;
    for (Scalar h : r.min_h) avg += h;
    agg.mean_time_avg_min_h.push_back(r.min_h.empty() ? 0.0 : avg / r.min_h.size());
    min_h_sum += run_min;
    agg.worst_min_h = std::min(agg.worst_min_h, run_min);
    for (std::size_t k = 0; k < r.tracking_error.size() && k < agg.mean_tracking_error.size();
         ++k) {
      agg.mean_tracking_error[k] += r.tracking_error[k];
      ++tracking_counts[k];
    }
  }
  for (std::size_t k = 0; k < agg.mean_tracking_error.size(); ++k)
    if (tracking_counts[k] > 0) agg.mean_tracking_error[k] /= tracking_counts[k];
  agg.success_rate = static_cast<Scalar>(successes) / n_runs;
  agg.mean_effort = effort / n_runs;
  agg.mean_min_h = min_h_sum / n_runs;
  const Scalar half_width =
      1.96 * std::sqrt(std::max<Scalar>(agg.success_rate * (1 - agg.success_rate), 0.0) /
                       n_runs);
  agg.ci_lo = std::max<Scalar>(0.0, agg.success_rate - half_width);
  agg.ci_hi = std::min<Scalar>(1.0, agg.success_rate + half_width);
  return agg;
}

void write_run_csv(const std::string& path, const ScenarioSpec& spec,
                   const RunResult& result, std::uint64_t run_index) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  out << "# scenario " << scenario_to_json(spec).dump() << "\n";
  out << "# seed " << spec.seed << " run " << run_index << "\n";
  const Index n = spec.initial_states.empty()
                      ? make_plant(spec.plant_key, spec.plant_params).n()
                      : spec.initial_states.front().dim();
  out << "t,agent";
  for (Index k = 0; k < n; ++k) out << ",p" << k;
  for (Index k = 0; k < n; ++k) out << ",v" << k;
  const Index m = make_plant(spec.plant_key, spec.plant_params).m();
  for (Index k = 0; k < m; ++k) out << ",u" << k;
  out << ",min_h\n";
  for (std::size_t tick = 0; tick < result.inputs.size(); ++tick) {
    for (int agent = 0; agent < spec.n_agents; ++agent) {
      out << result.times[tick] << "," << agent;
      const AgentState& s = result.states[tick][agent];
      for (Index k = 0; k < n; ++k) out << "," << s.p[k];
      for (Index k = 0; k < n; ++k) out << "," << s.v[k];
      for (Index k = 0; k < m; ++k) out << "," << result.inputs[tick][agent][k];
      out << "," << result.agent_min_h[tick][agent] << "\n";
    }
  }
}

void write_aggregate_json(const std::string& path, const ScenarioSpec& spec,
                          const Aggregate& aggregate) {
  nlohmann::json j;
  j["scenario"] = scenario_to_json(spec);
  j["seed"] = spec.seed;
  j["n_runs"] = aggregate.n_runs;
  j["success_rate"] = aggregate.success_rate;
  j["success_ci"] = {aggregate.ci_lo, aggregate.ci_hi};
  j["mean_control_effort"] = aggregate.mean_effort;
  j["collisions"] = aggregate.collisions;
  j["worst_min_h"] = aggregate.worst_min_h;
  j["mean_min_h"] = aggregate.mean_min_h;
  j["run_min_h"] = aggregate.run_min_h;
  j["run_effort"] = aggregate.run_effort;
  j["time_avg_min_h"] = aggregate.mean_time_avg_min_h;
  j["mean_tracking_error"] = aggregate.mean_tracking_error;
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace safetrack
