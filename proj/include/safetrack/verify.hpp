#pragma once

#include <safetrack/types.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace safetrack {

/// Analytic barrier gradient and safe-velocity rate against central finite
/// differences over random safe multi-agent configurations.
struct GradientCheck {
  Scalar worst_grad_rel = 0.0;
  Scalar worst_rate_rel = 0.0;
  int configs = 0;
};
GradientCheck verify_gradients(int n_configs = 100, std::uint64_t seed = 7);

/// Safety filters and tracking filter against the stationarity-system
/// halfspace oracle over randomized instances (dims 1..6).
struct KktCheck {
  Scalar worst_deviation = 0.0;
  int instances = 0;
};
KktCheck verify_kkt(int instances = 10000, std::uint64_t seed = 11);

/// Finite-difference decrease rate of the safety Lyapunov function along
/// disturbance-free filtered closed loops, versus the certified bound.
/// cushion[k] is the worst positive excess at dt / 2^k; it should shrink
/// roughly linearly with dt.
struct LyapunovCheck {
  std::array<Scalar, 3> cushion_lagrangian{};
  std::array<Scalar, 3> cushion_general{};
  Scalar general_form_gap = 0.0;  // plain-psi vs k_p-weighted form at k_p != 1
};
LyapunovCheck verify_lyapunov(std::uint64_t seed = 3);

/// Pointwise-Riccati metric along closed-loop trajectories: worst eigenvalue
/// of the contraction inequality (central-difference Mdot), plus the exact
/// LTI identity error and a falsification probe with an oversized gain.
struct ContractionCheck {
  Scalar residual = 0.0;          // nonlinear benchmark trajectory
  Scalar lti_identity_error = 0.0;
  Scalar broken_gain_residual = 0.0;  // should be positive
};
ContractionCheck verify_contraction(std::uint64_t seed = 5);

/// Stochastic tracking-error envelope: Monte-Carlo sample mean of |s(t)|
/// against a + b exp(-k_r_bar t), and the exceedance frequency of the
/// position deviation against the expected-deviation bound.
struct EnvelopeCheck {
  std::vector<Scalar> times;
  std::vector<Scalar> mean_s;
  std::vector<Scalar> bound;
  std::vector<Scalar> exceed_freq;
  std::vector<Scalar> markov_bound;  // D_E(t)/D_s + 3 sigma
  Scalar worst_ratio = 0.0;          // max mean_s / bound
  Scalar steady_mean_s = 0.0;        // tail average of mean_s
  bool markov_ok = true;
  Scalar d_s = 0.0;
};
EnvelopeCheck verify_envelope(int paths = 500, std::uint64_t seed = 9,
                              Scalar k_r = 2.0, Scalar d_bar = 0.1,
                              Scalar gamma_bar = 0.1);

void write_envelope_csv(const std::string& path, const EnvelopeCheck& check);

}  // namespace safetrack
