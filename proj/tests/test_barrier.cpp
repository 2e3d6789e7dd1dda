#include <doctest.h>

#include <safetrack/barrier.hpp>
#include <safetrack/rng.hpp>

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

Observation single_neighbor(const Vector& offset, const Vector& v_self = vec2(0, 0),
                            const Vector& v_other = vec2(0, 0)) {
  Observation obs;
  obs.self_index = 0;
  obs.self = AgentState(vec2(0, 0), v_self);
  obs.neighbor_agents.emplace_back(1, AgentState(offset, v_other));
  return obs;
}

}  // namespace

TEST_CASE("clearance at the inflated radius, sensing radius and in between") {
  const SafetyConfig cfg = cfg_default();
  CHECK(clearance(vec2(cfg.inflated_radius(), 0), cfg) == doctest::Approx(0.0));
  CHECK(clearance(vec2(cfg.r_sen, 0), cfg) == doctest::Approx(1.0));

  SafetyConfig weighted;
  weighted.r_s = 0.25;
  weighted.delta_r_s = 0.25;  // inflated radius 0.5
  weighted.r_sen = 2.0;
  Matrix xi(2, 2);
  xi << 1.0, 0.0, 0.0, 0.25;
  weighted.xi = xi;
  // |(0,2)|_xi = 1, so h = (1 - 0.5) / 1.5.
  CHECK(clearance(vec2(0, 2), weighted) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("barrier with no neighbors is zero") {
  Observation obs;
  obs.self = AgentState(vec2(0, 0), vec2(0, 0));
  const BarrierEval eval = eval_barrier(obs, cfg_default());
  CHECK(eval.psi == 0.0);
  CHECK(eval.grad_p.norm() == 0.0);
  CHECK(eval.h_values.empty());
  CHECK(safe_velocity(obs, cfg_default(), 1.0).norm() == 0.0);
}

TEST_CASE("single neighbor at the sensing boundary") {
  const SafetyConfig cfg = cfg_default();
  const Observation obs = single_neighbor(vec2(cfg.r_sen, 0));
  const BarrierEval eval = eval_barrier(obs, cfg);
  CHECK(eval.psi == doctest::Approx(0.0));
  // Single-term chain rule: |grad| = |Xi p| / (|p|_xi * scale * h).
  CHECK(eval.grad_p.norm() ==
        doctest::Approx(cfg.r_sen / (cfg.r_sen * cfg.clearance_scale())));
}

TEST_CASE("two neighbors at h = 1/2 give psi = 2 log 2") {
  const SafetyConfig cfg = cfg_default();
  const Scalar mid = 0.5 * (cfg.inflated_radius() + cfg.r_sen);
  Observation obs = single_neighbor(vec2(mid, 0));
  obs.neighbor_agents.emplace_back(2, AgentState(vec2(-mid, 0), vec2(0, 0)));
  const BarrierEval eval = eval_barrier(obs, cfg);
  CHECK(eval.psi == doctest::Approx(2.0 * std::log(2.0)));
  CHECK(eval.min_h == doctest::Approx(0.5));
  // Symmetric pair cancels the gradient and the safe velocity.
  CHECK(eval.grad_p.norm() == doctest::Approx(0.0));
  CHECK(safe_velocity(obs, cfg, 2.0).norm() == doctest::Approx(0.0));
}

TEST_CASE("barrier raises once a clearance hits the floor") {
  const SafetyConfig cfg = cfg_default();
  CHECK_THROWS_AS(eval_barrier(single_neighbor(vec2(0.3, 0)), cfg), NotSafeError);
}

TEST_CASE("psi is nonnegative inside the sensing radius") {
  const SafetyConfig cfg = cfg_default();
  for (int i = 0; i < 200; ++i) {
    const Scalar radius =
        rng::uniform(rng::key(3, i), cfg.inflated_radius() + 1e-3, cfg.r_sen);
    const Vector dir = rng::unit_vector(rng::key(4, i), 2);
    const BarrierEval eval = eval_barrier(single_neighbor(radius * dir), cfg);
    CHECK(eval.psi >= 0.0);
  }
}

TEST_CASE("moving a neighbor radially outward strictly decreases psi") {
  const SafetyConfig cfg = cfg_default();
  const Vector dir = vec2(0.8, 0.6);
  Scalar prev = std::numeric_limits<Scalar>::infinity();
  for (Scalar radius = 0.7; radius < 1.9; radius += 0.1) {
    const Scalar psi = eval_barrier(single_neighbor(radius * dir), cfg).psi;
    CHECK(psi < prev);
    prev = psi;
  }
}

TEST_CASE("generalized pairwise form reproduces the default bit for bit") {
  const SafetyConfig cfg = cfg_default();
  Observation obs = single_neighbor(vec2(0.9, 0.4));
  obs.neighbor_obstacles.emplace_back(0, vec2(-0.8, 0.7));
  const BarrierEval a = eval_barrier(obs, cfg);
  const BarrierEval b = eval_barrier(obs, cfg, distance_pairwise_safety(cfg));
  CHECK(a.psi == b.psi);
  CHECK((a.grad_p == b.grad_p));
  REQUIRE(a.h_values.size() == b.h_values.size());
  for (std::size_t k = 0; k < a.h_values.size(); ++k)
    CHECK(a.h_values[k].h == b.h_values[k].h);
}

TEST_CASE("a custom pairwise safety function is honored") {
  const SafetyConfig cfg = cfg_default();
  PairwiseSafety pw;
  // h depending on the full state distance, not only position.
  pw.value = [](const AgentState& a, const AgentState& b) {
    return 0.5 * (b.p - a.p).squaredNorm();
  };
  pw.grad_self_p = [](const AgentState& a, const AgentState& b) -> Vector {
    return -(b.p - a.p);
  };
  const Observation obs = single_neighbor(vec2(1.0, 1.0));
  const BarrierEval eval = eval_barrier(obs, cfg, pw);
  CHECK(eval.psi == doctest::Approx(-std::log(1.0)));
  CHECK(eval.grad_p.isApprox(vec2(1.0, 1.0)));
}

TEST_CASE("safe velocity points away from a single neighbor ahead") {
  const SafetyConfig cfg = cfg_default();
  const Vector offset = vec2(1.0, 0.0);
  const Vector v_d = safe_velocity(single_neighbor(offset), cfg, 1.5);
  CHECK(v_d.dot(offset) < 0.0);
  CHECK(std::abs(v_d[1]) < 1e-14);
}

TEST_CASE("safe velocity rate vanishes for a static configuration") {
  const SafetyConfig cfg = cfg_default();
  const Observation obs = single_neighbor(vec2(1.0, 0.3));
  CHECK(safe_velocity_rate(obs, cfg, 1.0).norm() == doctest::Approx(0.0));
}

TEST_CASE("safe velocity rate matches finite differences") {
  const SafetyConfig cfg = cfg_default();
  for (int trial = 0; trial < 20; ++trial) {
    const Vector offset =
        rng::uniform(rng::key(11, trial), 0.8, 1.8) * rng::unit_vector(rng::key(12, trial), 2);
    const Vector v_self = rng::normal_vector(rng::key(13, trial), 2);
    const Vector v_other = rng::normal_vector(rng::key(14, trial), 2);
    const Observation obs = single_neighbor(offset, v_self, v_other);
    const Vector analytic = safe_velocity_rate(obs, cfg, 1.3);
    const Scalar dt = 1e-6;
    auto v_d_at = [&](Scalar delta) {
      Observation moved = obs;
      moved.self.p += delta * v_self;
      moved.neighbor_agents[0].second.p += delta * v_other;
      return safe_velocity(moved, cfg, 1.3);
    };
    const Vector fd = (v_d_at(dt) - v_d_at(-dt)) / (2.0 * dt);
    CHECK((analytic - fd).norm() <= 1e-5 * std::max<Scalar>(1.0, fd.norm()));
  }
}

TEST_CASE("tangential relative motion keeps the gradient magnitude factors still") {
  SafetyConfig cfg = cfg_default();  // identity weight
  const Vector offset = vec2(1.2, 0.0);
  const Vector tangential = vec2(0.0, 0.7);
  const Observation obs = single_neighbor(offset, vec2(0, 0), tangential);
  const Vector rate = safe_velocity_rate(obs, cfg, 1.0);
  // Radial speed is zero, so h and |p| are stationary; the rate reduces to
  // the rotation of the gradient direction, which is orthogonal to p_ij.
  CHECK(std::abs(rate.dot(offset.normalized())) < 1e-12);
  CHECK(rate.norm() > 0.0);
}
