#pragma once

#include <safetrack/types.hpp>

namespace safetrack {

/// Gains of the tracking layer.
struct RobustGains {
  Matrix lambda_r;          // SPD position gain; empty means identity
  Scalar k_r = 1.0;         // composite-error gain
  Scalar epsilon_d = 1.0;   // Young's-inequality split parameter

  Matrix lambda_or_identity(Index n) const {
    return lambda_r.size() == 0 ? Matrix::Identity(n, n) : lambda_r;
  }
  Scalar lambda_min(Index n) const;
  void validate(Index n) const;
};

/// Which printed form of the Lagrangian safe target input to use. The two
/// coincide whenever the safe velocity is the pure gradient rule.
enum class UBarVariant { kRevised, kDraft };

/// Gains of the safety layer plus the metric construction knobs.
struct FilterGains {
  Scalar k_p = 1.0;
  Scalar k_v = 1.0;
  Matrix actuation_weight;  // R in the contraction inequality; empty = identity
  Scalar q_margin = 1.0;    // scale of the Riccati margin matrix Q
  UBarVariant u_bar_variant = UBarVariant::kRevised;
  RobustGains robust;
  int replan_interval = 10;  // ticks between target-trajectory refreshes

  Matrix r_or_identity(Index m) const {
    return actuation_weight.size() == 0 ? Matrix::Identity(m, m) : actuation_weight;
  }
  void validate(Index n, Index m) const;
};

}  // namespace safetrack
