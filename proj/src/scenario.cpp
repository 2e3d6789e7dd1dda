#include <safetrack/scenario.hpp>

#include <safetrack/barrier.hpp>
#include <safetrack/rng.hpp>

#include <fstream>

namespace safetrack {

using nlohmann::json;

namespace {

Vector vector_from_json(const json& j) {
  Vector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Index>(k)] = j[k].get<Scalar>();
  return v;
}

json vector_to_json(const Vector& v) {
  json j = json::array();
  for (Index k = 0; k < v.size(); ++k) j.push_back(v[k]);
  return j;
}

// Accepts a scalar (meaning scalar * I), "identity", or a nested array.
Matrix matrix_from_json(const json& j, Index dim) {
  if (j.is_string() && j.get<std::string>() == "identity")
    return Matrix::Identity(dim, dim);
  if (j.is_number()) return j.get<Scalar>() * Matrix::Identity(dim, dim);
  Matrix m(j.size(), j.empty() ? 0 : j[0].size());
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < j[r].size(); ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<Scalar>();
  return m;
}

json matrix_to_json(const Matrix& m) {
  json j = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

AgentState state_from_json(const json& j) {
  return AgentState(vector_from_json(j.at("p")), vector_from_json(j.at("v")));
}

json state_to_json(const AgentState& s) {
  return json{{"p", vector_to_json(s.p)}, {"v", vector_to_json(s.v)}};
}

DisturbanceSpec::Profile profile_from_string(const std::string& s) {
  if (s == "constant_direction") return DisturbanceSpec::Profile::kConstantDirection;
  if (s == "sinusoidal") return DisturbanceSpec::Profile::kSinusoidal;
  if (s == "worst_case_radial") return DisturbanceSpec::Profile::kWorstCaseRadial;
  throw ValidationError("disturbance.profile: unknown value '" + s + "'");
}

std::string profile_to_string(DisturbanceSpec::Profile p) {
  switch (p) {
    case DisturbanceSpec::Profile::kConstantDirection: return "constant_direction";
    case DisturbanceSpec::Profile::kSinusoidal: return "sinusoidal";
    case DisturbanceSpec::Profile::kWorstCaseRadial: return "worst_case_radial";
  }
  return "constant_direction";
}

PolicyKind kind_from_string(const std::string& s) {
  if (s == "global_reference") return PolicyKind::kGlobalReference;
  if (s == "learned") return PolicyKind::kLearned;
  if (s == "safety_filter") return PolicyKind::kSafetyFilter;
  if (s == "robust_tracking") return PolicyKind::kRobustTracking;
  if (s == "clf_cbf_qp") return PolicyKind::kClfCbfQp;
  throw ValidationError("policy.kind: unknown value '" + s + "'");
}

std::string kind_to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kGlobalReference: return "global_reference";
    case PolicyKind::kLearned: return "learned";
    case PolicyKind::kSafetyFilter: return "safety_filter";
    case PolicyKind::kRobustTracking: return "robust_tracking";
    case PolicyKind::kClfCbfQp: return "clf_cbf_qp";
  }
  return "learned";
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

namespace {
ScenarioSpec scenario_from_json_impl(const json& j);
}  // namespace

ScenarioSpec scenario_from_json(const json& j) {
  try {
    return scenario_from_json_impl(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
}

namespace {
ScenarioSpec scenario_from_json_impl(const json& j) {
  ScenarioSpec spec;
  maybe(j, "schema_version", spec.schema_version);
  if (spec.schema_version != 1)
    throw ValidationError("schema_version: only version 1 is supported");
  maybe(j, "name", spec.name);
  if (j.contains("plant")) spec.plant_key = j.at("plant").get<std::string>();
  if (j.contains("plant_params")) {
    const json& pp = j.at("plant_params");
    maybe(pp, "mean_motion", spec.plant_params.mean_motion);
    maybe(pp, "underactuated", spec.plant_params.underactuated);
    long dim = spec.plant_params.dim;
    maybe(pp, "dim", dim);
    spec.plant_params.dim = dim;
  }
  maybe(j, "n_agents", spec.n_agents);
  if (j.contains("obstacles"))
    for (const json& o : j.at("obstacles")) spec.obstacles.push_back(vector_from_json(o));
  if (j.contains("initial_states"))
    for (const json& s : j.at("initial_states"))
      spec.initial_states.push_back(state_from_json(s));
  if (j.contains("goal_states"))
    for (const json& s : j.at("goal_states")) spec.goal_states.push_back(state_from_json(s));

  auto read_randomize = [](const json& r) {
    RandomizeSpec out;
    out.enabled = true;
    out.p_lo = vector_from_json(r.at("position_box").at(0));
    out.p_hi = vector_from_json(r.at("position_box").at(1));
    if (r.contains("zero_velocity")) out.zero_velocity = r.at("zero_velocity").get<bool>();
    if (r.contains("min_clearance")) out.min_clearance = r.at("min_clearance").get<Scalar>();
    return out;
  };
  if (j.contains("randomize_initial"))
    spec.randomize_initial = read_randomize(j.at("randomize_initial"));
  if (j.contains("randomize_goal"))
    spec.randomize_goal = read_randomize(j.at("randomize_goal"));

  const Plant plant = make_plant(spec.plant_key, spec.plant_params);
  if (j.contains("safety")) {
    const json& s = j.at("safety");
    maybe(s, "r_s", spec.safety.r_s);
    maybe(s, "delta_r_s", spec.safety.delta_r_s);
    maybe(s, "r_sen", spec.safety.r_sen);
    if (s.contains("xi")) spec.safety.xi = matrix_from_json(s.at("xi"), plant.n());
  }
  if (j.contains("gains")) {
    const json& g = j.at("gains");
    maybe(g, "k_p", spec.gains.k_p);
    maybe(g, "k_v", spec.gains.k_v);
    maybe(g, "q_margin", spec.gains.q_margin);
    maybe(g, "replan_interval", spec.gains.replan_interval);
    if (g.contains("actuation_weight"))
      spec.gains.actuation_weight = matrix_from_json(g.at("actuation_weight"), plant.m());
    if (g.contains("u_bar_variant")) {
      const std::string variant = g.at("u_bar_variant").get<std::string>();
      if (variant == "revised")
        spec.gains.u_bar_variant = UBarVariant::kRevised;
      else if (variant == "draft")
        spec.gains.u_bar_variant = UBarVariant::kDraft;
      else
        throw ValidationError("gains.u_bar_variant: unknown value '" + variant + "'");
    }
    if (g.contains("robust")) {
      const json& r = g.at("robust");
      maybe(r, "k_r", spec.gains.robust.k_r);
      maybe(r, "epsilon_d", spec.gains.robust.epsilon_d);
      if (r.contains("lambda_r"))
        spec.gains.robust.lambda_r = matrix_from_json(r.at("lambda_r"), plant.n());
    }
  }
  if (j.contains("disturbance")) {
    const json& d = j.at("disturbance");
    maybe(d, "d_bar", spec.disturbance.d_bar);
    maybe(d, "gamma_bar", spec.disturbance.gamma_bar);
    if (d.contains("profile"))
      spec.disturbance.profile = profile_from_string(d.at("profile").get<std::string>());
    maybe(d, "seed", spec.disturbance.seed);
  }
  if (j.contains("policy")) {
    const json& p = j.at("policy");
    if (p.contains("kind")) spec.policy.kind = kind_from_string(p.at("kind").get<std::string>());
    maybe(p, "error_magnitude", spec.policy.error_magnitude);
    maybe(p, "track_kp", spec.policy.track_kp);
    maybe(p, "track_kd", spec.policy.track_kd);
    if (p.contains("qp")) {
      const json& q = p.at("qp");
      maybe(q, "alpha_h", spec.policy.qp.alpha_h);
      maybe(q, "alpha_v", spec.policy.qp.alpha_v);
      maybe(q, "rho_weight", spec.policy.qp.rho_weight);
      maybe(q, "input_box_limit", spec.policy.qp.input_box_limit);
      maybe(q, "mu", spec.policy.qp.mu);
      maybe(q, "w_p", spec.policy.qp.w_p);
      maybe(q, "w_v", spec.policy.qp.w_v);
    }
  }
  maybe(j, "dt", spec.dt);
  maybe(j, "substeps", spec.substeps);
  maybe(j, "horizon", spec.horizon);
  maybe(j, "n_monte_carlo", spec.n_monte_carlo);
  maybe(j, "seed", spec.seed);
  maybe(j, "goal_tolerance", spec.goal_tolerance);
  if (j.contains("planner")) {
    const json& p = j.at("planner");
    maybe(p, "knots", spec.planner.knots);
    maybe(p, "gn_iterations", spec.planner.gn_iterations);
    maybe(p, "agent_sweeps", spec.planner.agent_sweeps);
    maybe(p, "defect_weight", spec.planner.defect_weight);
    maybe(p, "terminal_weight", spec.planner.terminal_weight);
    maybe(p, "collision_weight", spec.planner.collision_weight);
    maybe(p, "collision_margin", spec.planner.collision_margin);
    maybe(p, "ignore_collisions", spec.planner.ignore_collisions);
  }
  maybe(j, "force_general_path", spec.force_general_path);
  spec.validate();
  return spec;
}
}  // namespace

json scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["schema_version"] = spec.schema_version;
  j["name"] = spec.name;
  j["plant"] = spec.plant_key;
  j["plant_params"] = {{"mean_motion", spec.plant_params.mean_motion},
                       {"underactuated", spec.plant_params.underactuated},
                       {"dim", spec.plant_params.dim}};
  j["n_agents"] = spec.n_agents;
  j["obstacles"] = json::array();
  for (const Vector& o : spec.obstacles) j["obstacles"].push_back(vector_to_json(o));
  j["initial_states"] = json::array();
  for (const AgentState& s : spec.initial_states)
    j["initial_states"].push_back(state_to_json(s));
  j["goal_states"] = json::array();
  for (const AgentState& s : spec.goal_states) j["goal_states"].push_back(state_to_json(s));
  auto write_randomize = [](const RandomizeSpec& r) {
    return json{{"position_box", {vector_to_json(r.p_lo), vector_to_json(r.p_hi)}},
                {"zero_velocity", r.zero_velocity},
                {"min_clearance", r.min_clearance}};
  };
  if (spec.randomize_initial.enabled)
    j["randomize_initial"] = write_randomize(spec.randomize_initial);
  if (spec.randomize_goal.enabled) j["randomize_goal"] = write_randomize(spec.randomize_goal);
  j["safety"] = {{"r_s", spec.safety.r_s},
                 {"delta_r_s", spec.safety.delta_r_s},
                 {"r_sen", spec.safety.r_sen}};
  if (spec.safety.xi.size() != 0) j["safety"]["xi"] = matrix_to_json(spec.safety.xi);
  j["gains"] = {{"k_p", spec.gains.k_p},
                {"k_v", spec.gains.k_v},
                {"q_margin", spec.gains.q_margin},
                {"replan_interval", spec.gains.replan_interval},
                {"u_bar_variant",
                 spec.gains.u_bar_variant == UBarVariant::kRevised ? "revised" : "draft"},
                {"robust",
                 {{"k_r", spec.gains.robust.k_r},
                  {"epsilon_d", spec.gains.robust.epsilon_d}}}};
  if (spec.gains.actuation_weight.size() != 0)
    j["gains"]["actuation_weight"] = matrix_to_json(spec.gains.actuation_weight);
  if (spec.gains.robust.lambda_r.size() != 0)
    j["gains"]["robust"]["lambda_r"] = matrix_to_json(spec.gains.robust.lambda_r);
  j["disturbance"] = {{"d_bar", spec.disturbance.d_bar},
                      {"gamma_bar", spec.disturbance.gamma_bar},
                      {"profile", profile_to_string(spec.disturbance.profile)},
                      {"seed", spec.disturbance.seed}};
  j["policy"] = {{"kind", kind_to_string(spec.policy.kind)},
                 {"error_magnitude", spec.policy.error_magnitude},
                 {"track_kp", spec.policy.track_kp},
                 {"track_kd", spec.policy.track_kd},
                 {"qp",
                  {{"alpha_h", spec.policy.qp.alpha_h},
                   {"alpha_v", spec.policy.qp.alpha_v},
                   {"rho_weight", spec.policy.qp.rho_weight},
                   {"input_box_limit", spec.policy.qp.input_box_limit},
                   {"mu", spec.policy.qp.mu},
                   {"w_p", spec.policy.qp.w_p},
                   {"w_v", spec.policy.qp.w_v}}}};
  j["dt"] = spec.dt;
  j["substeps"] = spec.substeps;
  j["horizon"] = spec.horizon;
  j["n_monte_carlo"] = spec.n_monte_carlo;
  j["seed"] = spec.seed;
  j["goal_tolerance"] = spec.goal_tolerance;
  j["planner"] = {{"knots", spec.planner.knots},
                  {"gn_iterations", spec.planner.gn_iterations},
                  {"agent_sweeps", spec.planner.agent_sweeps},
                  {"defect_weight", spec.planner.defect_weight},
                  {"terminal_weight", spec.planner.terminal_weight},
                  {"collision_weight", spec.planner.collision_weight},
                  {"collision_margin", spec.planner.collision_margin},
                  {"ignore_collisions", spec.planner.ignore_collisions}};
  j["force_general_path"] = spec.force_general_path;
  return j;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("scenario parse error in " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ValidationError("--set expects key.path=value, got '" + assignment + "'");
  std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  for (char& c : path)
    if (c == '.') c = '/';
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // plain string
  }
  j[json::json_pointer("/" + path)] = parsed;
}

void ScenarioSpec::validate() const {
  const Plant plant = make_plant(plant_key, plant_params);
  const Index n = plant.n();
  if (n_agents < 1) throw ValidationError("n_agents: must be >= 1");
  if (!(dt > 0)) throw ValidationError("dt: must be > 0");
  if (substeps < 1) throw ValidationError("substeps: must be >= 1");
  if (!(horizon >= dt)) throw ValidationError("horizon: must be >= dt");
  if (n_monte_carlo < 1) throw ValidationError("n_monte_carlo: must be >= 1");
  if (!(goal_tolerance > 0)) throw ValidationError("goal_tolerance: must be > 0");
  safety.validate(n);
  gains.validate(n, plant.m());
  disturbance.validate();
  policy.validate();
  planner.validate();
  for (const Vector& o : obstacles)
    if (o.size() != n) throw ValidationError("obstacles: dimension mismatch");
  if (!randomize_initial.enabled) {
    if (static_cast<int>(initial_states.size()) != n_agents)
      throw ValidationError("initial_states: need one per agent (or randomize_initial)");
    for (const AgentState& s : initial_states)
      if (s.dim() != n) throw ValidationError("initial_states: dimension mismatch");
  } else if (randomize_initial.p_lo.size() != n || randomize_initial.p_hi.size() != n) {
    throw ValidationError("randomize_initial.position_box: dimension mismatch");
  }
  if (!randomize_goal.enabled) {
    if (static_cast<int>(goal_states.size()) != n_agents)
      throw ValidationError("goal_states: need one per agent (or randomize_goal)");
    for (const AgentState& s : goal_states)
      if (s.dim() != n) throw ValidationError("goal_states: dimension mismatch");
  } else if (randomize_goal.p_lo.size() != n || randomize_goal.p_hi.size() != n) {
    throw ValidationError("randomize_goal.position_box: dimension mismatch");
  }
}

namespace {

std::vector<AgentState> sample_configuration(const RandomizeSpec& r, int n_agents,
                                             const std::vector<Vector>& obstacles,
                                             const SafetyConfig& cfg,
                                             std::uint64_t config_key) {
  const Index n = r.p_lo.size();
  const Scalar clearance_floor =
      r.min_clearance > 0 ? r.min_clearance : cfg.r_s + 2.0 * cfg.delta_r_s;
  std::vector<AgentState> agents;
  for (int i = 0; i < n_agents; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 4000 && !placed; ++attempt) {
      Vector p(n);
      for (Index k = 0; k < n; ++k)
        p[k] = rng::uniform(rng::key(config_key, i, attempt, k), r.p_lo[k], r.p_hi[k]);
      placed = true;
      for (const AgentState& other : agents)
        if ((other.p - p).norm() < clearance_floor) placed = false;
      for (const Vector& o : obstacles)
        if ((o - p).norm() < clearance_floor) placed = false;
      if (placed) agents.emplace_back(p, Vector::Zero(n));
    }
    if (!placed)
      throw ValidationError("randomize: could not place agents with required clearance");
  }
  return agents;
}

}  // namespace

RunSetup build_run_setup(const ScenarioSpec& spec, std::uint64_t run_index) {
  RunSetup setup;
  setup.world.time = 0.0;
  setup.world.obstacles = spec.obstacles;
  if (spec.randomize_initial.enabled) {
    setup.world.agents =
        sample_configuration(spec.randomize_initial, spec.n_agents, spec.obstacles,
                             spec.safety, rng::key(spec.seed, run_index, 0x696eULL));
  } else {
    setup.world.agents = spec.initial_states;
  }
  if (spec.randomize_goal.enabled) {
    setup.goals =
        sample_configuration(spec.randomize_goal, spec.n_agents, spec.obstacles,
                             spec.safety, rng::key(spec.seed, run_index, 0x676fULL));
  } else {
    setup.goals = spec.goal_states;
  }
  setup.world.validate();
  return setup;
}

}  // namespace safetrack
