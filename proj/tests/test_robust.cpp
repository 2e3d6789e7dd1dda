#include <doctest.h>

#include <safetrack/halfspace.hpp>
#include <safetrack/rng.hpp>
#include <safetrack/robust_filter.hpp>

#include <cmath>

using namespace safetrack;

namespace {

Vector vec2(Scalar x, Scalar y) {
  Vector v(2);
  v << x, y;
  return v;
}

TrajectorySchedule::Point random_point(std::uint64_t k, Index n) {
  TrajectorySchedule::Point point;
  point.p = rng::normal_vector(rng::mix(k, 1), n);
  point.v = rng::normal_vector(rng::mix(k, 2), n);
  point.u = rng::normal_vector(rng::mix(k, 3), n);
  point.a = rng::normal_vector(rng::mix(k, 4), n);
  return point;
}

}  // namespace

TEST_CASE("tracking filter passes through on the target") {
  const LagrangianPlant plant = make_unit_mass_plant(2);
  RobustGains gains;
  gains.k_r = 2.0;
  const TrajectorySchedule::Point point = random_point(rng::key(1), 2);
  const AgentState on_target(point.p, point.v);
  const SafetyFilterOutput out = robust_filter(point.u, point, on_target, plant, gains);
  CHECK(!out.active);
  CHECK((out.u == point.u));
}

TEST_CASE("tracking filter projection and oracle agreement") {
  const LagrangianPlant plant = make_unit_mass_plant(3);
  RobustGains gains;
  gains.k_r = 1.2;
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint64_t k = rng::key(5, trial);
    const TrajectorySchedule::Point point = random_point(k, 3);
    const AgentState state(rng::normal_vector(rng::mix(k, 7), 3),
                           rng::normal_vector(rng::mix(k, 8), 3));
    const SafetyFilterOutput out = robust_filter(point.u, point, state, plant, gains);
    CHECK((out.u - out.u_bar).dot(out.direction) <= 1e-12);
    CHECK((out.u - qp_oracle_halfspace(point.u, out.u_bar, out.direction)).norm() <=
          1e-12);
  }
}

TEST_CASE("u_target = u_bar + s projects exactly onto u_bar") {
  const LagrangianPlant plant = make_unit_mass_plant(2);
  RobustGains gains;
  gains.k_r = 1.0;
  const TrajectorySchedule::Point point = random_point(rng::key(9), 2);
  AgentState state(point.p + vec2(0.3, -0.2), point.v + vec2(0.1, 0.4));
  const Vector s = (state.v - point.v) + (state.p - point.p);
  // First recover u_bar through an inactive call, then force the projection.
  const SafetyFilterOutput probe = robust_filter(point.u, point, state, plant, gains);
  const SafetyFilterOutput out =
      robust_filter(probe.u_bar + s, point, state, plant, gains);
  CHECK(out.active);
  CHECK(out.u.isApprox(probe.u_bar, 1e-10));
  CHECK(std::abs((out.u - out.u_bar).dot(out.direction)) <= 1e-12);
}

TEST_CASE("general tracking filter coincides with the Lagrangian one on a point mass") {
  const LagrangianPlant lag = make_unit_mass_plant(2);
  const AffinePlant affine = to_affine(lag);
  RobustGains gains;
  gains.k_r = 1.7;
  const Matrix metric = Matrix::Identity(2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t k = rng::key(33, trial);
    const TrajectorySchedule::Point point = random_point(k, 2);
    const AgentState state(rng::normal_vector(rng::mix(k, 7), 2),
                           rng::normal_vector(rng::mix(k, 8), 2));
    const Vector u_lag = robust_filter(point.u, point, state, lag, gains).u;
    const Vector u_gen =
        robust_filter_general(point.u, point, state, affine, gains, metric, 0.0).u;
    CHECK((u_lag - u_gen).norm() <= 1e-10);
  }
}

TEST_CASE("general tracking filter matches the oracle") {
  const AffinePlant plant = make_nonlinear_example_plant();
  RobustGains gains;
  gains.k_r = 1.1;
  Matrix metric(2, 2);
  metric << 1.2, 0.1, 0.1, 0.8;
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t k = rng::key(35, trial);
    const TrajectorySchedule::Point point = random_point(k, 2);
    const AgentState state(rng::normal_vector(rng::mix(k, 7), 2),
                           rng::normal_vector(rng::mix(k, 8), 2));
    const SafetyFilterOutput out =
        robust_filter_general(point.u, point, state, plant, gains, metric, 0.3);
    CHECK((out.u - qp_oracle_halfspace(point.u, out.u_bar, out.direction)).norm() <=
          1e-12);
  }
}

TEST_CASE("envelope constants for the disturbance-free cases") {
  RobustGains gains;
  gains.k_r = 1.0;
  gains.epsilon_d = 1.0;
  DisturbanceSpec none;
  const ErrorEnvelope quiet = error_envelope(gains, unit_mass_bounds(0.0), none, 0.0, 2);
  CHECK(quiet.a == 0.0);
  CHECK(quiet.b == 0.0);
  CHECK(quiet.mean_bound(3.0) == 0.0);
  CHECK(quiet.expected_deviation(1.0) == 0.0);
  CHECK(quiet.probability_floor(1.0) == 1.0);

  // Transient only: pure exponential decay from the initial error.
  const ErrorEnvelope transient =
      error_envelope(gains, unit_mass_bounds(0.0), none, 0.7, 2);
  CHECK(transient.a == 0.0);
  CHECK(transient.b == doctest::Approx(0.7));
  CHECK(transient.mean_bound(2.0) ==
        doctest::Approx(0.7 * std::exp(-transient.k_r_bar * 2.0)));
}

TEST_CASE("envelope constants for the worked unit-mass case") {
  RobustGains gains;
  gains.k_r = 1.0;
  gains.epsilon_d = 1.0;
  DisturbanceSpec disturbance;
  disturbance.d_bar = 0.1;
  const ErrorEnvelope env =
      error_envelope(gains, unit_mass_bounds(0.0), disturbance, 0.0, 2);
  CHECK(env.k_r_bar == doctest::Approx(0.45));
  CHECK(env.C_d == doctest::Approx(0.1));
  CHECK(env.a == doctest::Approx(std::sqrt(0.1 / 0.9)));
  CHECK(env.b == 0.0);
  // The envelope is non-increasing.
  Scalar prev = env.mean_bound(0.0);
  for (Scalar t = 0.1; t < 5.0; t += 0.1) {
    CHECK(env.mean_bound(t) <= prev + 1e-15);
    prev = env.mean_bound(t);
  }
}

TEST_CASE("too small a tracking gain is rejected") {
  RobustGains gains;
  gains.k_r = 0.05;
  gains.epsilon_d = 1.0;
  DisturbanceSpec disturbance;
  disturbance.d_bar = 0.5;
  CHECK_THROWS_AS(error_envelope(gains, unit_mass_bounds(0.0), disturbance, 0.0, 2),
                  GainError);
}

TEST_CASE("margin selection from the deviation curve") {
  RobustGains gains;
  gains.k_r = 1.0;
  DisturbanceSpec none;
  const ErrorEnvelope quiet = error_envelope(gains, unit_mass_bounds(0.0), none, 0.0, 2);
  CHECK(margin_from_envelope(quiet, 0.9, 10.0) == 0.0);

  // With sup D_E = 0.05 the margins follow 0.05 / (1 - p).
  ErrorEnvelope synthetic = quiet;
  synthetic.initial_sq_error = 0.05;  // D_E(0) = 0.05, decaying afterwards
  synthetic.lambda_r_min = 1.0;
  CHECK(margin_from_envelope(synthetic, 0.9, 10.0) == doctest::Approx(0.5));
  CHECK(margin_from_envelope(synthetic, 0.99, 10.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(margin_from_envelope(synthetic, 1.5, 10.0), ValidationError);
}

TEST_CASE("plant bound estimation on a constant mass matrix") {
  const LagrangianPlant plant = make_unit_mass_plant(3);
  const Vector lo = -2.0 * Vector::Ones(3), hi = 2.0 * Vector::Ones(3);
  const PlantBounds bounds = estimate_plant_bounds(plant, lo, hi, 0.3, 200, 17);
  CHECK(bounds.m_lower == doctest::Approx(1.0 / 1.2));
  CHECK(bounds.m_upper == doctest::Approx(1.2));
  CHECK(bounds.m_x_bar <= 1e-6);
  CHECK(bounds.m_x2_bar <= 1e-3);
  CHECK(bounds.d_s_bar == doctest::Approx(std::pow(0.3 / bounds.m_lower, 2)));
}

TEST_CASE("schedule interpolation and domain checks") {
  TrajectorySchedule sched;
  sched.t0 = 1.0;
  sched.dt = 0.5;
  sched.n_agents = 1;
  sched.p = {{vec2(0, 0), vec2(1, 0), vec2(2, 0)}};
  sched.v = {{vec2(1, 0), vec2(1, 0), vec2(1, 0)}};
  sched.u = {{vec2(0.1, 0), vec2(0.2, 0), vec2(0.2, 0)}};
  sched.a = {{vec2(0, 0), vec2(0, 1), vec2(0, 2)}};
  CHECK(sched.end_time() == doctest::Approx(2.0));
  const auto mid = sched.at(0, 1.25);
  CHECK(mid.p[0] == doctest::Approx(0.5));
  CHECK(mid.u[0] == doctest::Approx(0.1));  // hold of the left knot
  CHECK(mid.a[1] == doctest::Approx(0.5));
  // Clamped beyond the ends.
  CHECK(sched.at(0, 5.0).p[0] == doctest::Approx(2.0));
  CHECK_THROWS_AS(sched.checked_at(0, 4.0), ValidationError);
}
