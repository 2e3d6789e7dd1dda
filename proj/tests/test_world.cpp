#include <doctest.h>

#include <safetrack/barrier.hpp>
#include <safetrack/rng.hpp>
#include <safetrack/world.hpp>

#include <cmath>

using namespace safetrack;

namespace {

Vector vec2(Scalar x, Scalar y) {
  Vector v(2);
  v << x, y;
  return v;
}

SafetyConfig cfg_default() {
  SafetyConfig cfg;
  cfg.r_s = 0.5;
  cfg.delta_r_s = 0.1;
  cfg.r_sen = 2.0;
  return cfg;
}

World two_agents(Scalar distance) {
  World w;
  w.agents = {AgentState(vec2(0, 0), vec2(0, 0)),
              AgentState(vec2(distance, 0), vec2(0, 0))};
  return w;
}

}  // namespace

TEST_CASE("observe excludes agents beyond the sensing radius") {
  const World w = two_agents(3.0);
  const Observation obs = observe(w, 0, cfg_default());
  CHECK(obs.neighbor_agents.empty());
  CHECK(obs.self_index == 0);
}

TEST_CASE("observe includes the sensing boundary") {
  const World w = two_agents(2.0);
  const Observation obs = observe(w, 0, cfg_default());
  REQUIRE(obs.neighbor_agents.size() == 1);
  CHECK(obs.neighbor_agents[0].first == 1);
}

TEST_CASE("collinear agents see exactly their in-range neighbors") {
  World w;
  w.agents = {AgentState(vec2(0, 0), vec2(0, 0)), AgentState(vec2(1, 0), vec2(0, 0)),
              AgentState(vec2(2, 0), vec2(0, 0))};
  SafetyConfig cfg = cfg_default();
  cfg.r_sen = 1.5;
  CHECK(observe(w, 0, cfg).neighbor_agents.size() == 1);
  CHECK(observe(w, 1, cfg).neighbor_agents.size() == 2);
  CHECK(observe(w, 2, cfg).neighbor_agents.size() == 1);
  CHECK(observe(w, 2, cfg).neighbor_agents[0].first == 1);
}

TEST_CASE("observe rejects out-of-range indices") {
  const World w = two_agents(1.0);
  CHECK_THROWS_AS(observe(w, 2, cfg_default()), ValidationError);
  CHECK_THROWS_AS(observe(w, -1, cfg_default()), ValidationError);
}

TEST_CASE("observation is symmetric between agents") {
  for (int trial = 0; trial < 30; ++trial) {
    World w;
    const int n_agents = 4;
    for (int i = 0; i < n_agents; ++i)
      w.agents.emplace_back(3.0 * rng::normal_vector(rng::key(77, trial, i), 2),
                            Vector::Zero(2));
    const SafetyConfig cfg = cfg_default();
    for (int i = 0; i < n_agents; ++i) {
      const Observation obs_i = observe(w, i, cfg);
      for (const auto& [j, st] : obs_i.neighbor_agents) {
        const Observation obs_j = observe(w, j, cfg);
        bool found = false;
        for (const auto& [back, st2] : obs_j.neighbor_agents)
          if (back == i) found = true;
        CHECK(found);
      }
    }
  }
}

TEST_CASE("global safety product: empty, boundary and midpoint cases") {
  const SafetyConfig cfg = cfg_default();
  CHECK(global_safety_product(two_agents(3.0), cfg) == doctest::Approx(1.0));
  CHECK(global_safety_product(two_agents(2.0), cfg) == doctest::Approx(1.0));
  // Midpoint between inflated radius and sensing radius gives h = 1/2.
  const Scalar mid = 0.5 * (cfg.inflated_radius() + cfg.r_sen);
  CHECK(global_safety_product(two_agents(mid), cfg) == doctest::Approx(0.5));
}

TEST_CASE("safety product sign tracks violations") {
  const SafetyConfig cfg = cfg_default();
  CHECK(global_safety_product(two_agents(1.0), cfg) > 0);
  CHECK(global_safety_product(two_agents(0.5), cfg) < 0);  // inside inflated radius
  CHECK(global_min_clearance(two_agents(0.5), cfg) < 0);
}

TEST_CASE("per-agent barrier sum double-counts agent pairs once each") {
  for (int trial = 0; trial < 20; ++trial) {
    World w;
    for (int i = 0; i < 4; ++i) {
      Vector p;
      // Rejection-sample a safe configuration.
      for (int attempt = 0;; ++attempt) {
        p = 2.2 * rng::normal_vector(rng::key(91, trial, i, attempt), 2);
        bool ok = true;
        for (const AgentState& a : w.agents)
          if ((a.p - p).norm() < 0.8) ok = false;
        if (ok) break;
      }
      w.agents.emplace_back(p, Vector::Zero(2));
    }
    w.obstacles = {vec2(0.9, 0.9), vec2(-1.1, 0.4)};
    for (const Vector& o : w.obstacles)
      for (const AgentState& a : w.agents)
        if ((a.p - o).norm() < 0.8) goto next_trial;  // resample by skipping
    {
      const SafetyConfig cfg = cfg_default();
      // Split the global value into agent-pair and obstacle terms by hand.
      Scalar pair_log = 0.0, obstacle_log = 0.0;
      for (std::size_t i = 0; i < w.agents.size(); ++i) {
        for (std::size_t j = i + 1; j < w.agents.size(); ++j) {
          const Vector d = w.agents[j].p - w.agents[i].p;
          if (d.norm() <= cfg.r_sen) pair_log -= std::log(clearance(d, cfg));
        }
        for (const Vector& o : w.obstacles) {
          const Vector d = o - w.agents[i].p;
          if (d.norm() <= cfg.r_sen) obstacle_log -= std::log(clearance(d, cfg));
        }
      }
      CHECK(global_log_barrier(w, cfg) ==
            doctest::Approx(pair_log + obstacle_log).epsilon(1e-12));
      Scalar per_agent_sum = 0.0;
      for (int i = 0; i < static_cast<int>(w.agents.size()); ++i)
        per_agent_sum += eval_barrier(observe(w, i, cfg), cfg).psi;
      CHECK(per_agent_sum ==
            doctest::Approx(2.0 * pair_log + obstacle_log).epsilon(1e-10));
    }
  next_trial:;
  }
}

TEST_CASE("safety config invariants") {
  SafetyConfig cfg = cfg_default();
  CHECK_NOTHROW(cfg.validate(2));
  cfg.r_sen = 0.55;
  CHECK_THROWS_AS(cfg.validate(2), ValidationError);
  cfg = cfg_default();
  Matrix xi(2, 2);
  xi << 1.5, 0.0, 0.0, 0.5;  // eigenvalue above 1
  cfg.xi = xi;
  CHECK_THROWS_AS(cfg.validate(2), ValidationError);
  xi << 0.5, 0.2, 0.1, 0.5;  // asymmetric
  cfg.xi = xi;
  CHECK_THROWS_AS(cfg.validate(2), ValidationError);
  xi << 0.5, 0.0, 0.0, 0.25;
  cfg.xi = xi;
  CHECK_NOTHROW(cfg.validate(2));
}

TEST_CASE("world validation catches mixed dimensions") {
  World w;
  w.agents = {AgentState(vec2(0, 0), vec2(0, 0))};
  Vector p3(3);
  p3 << 1, 2, 3;
  w.obstacles = {p3};
  CHECK_THROWS_AS(w.validate(), ValidationError);
}
