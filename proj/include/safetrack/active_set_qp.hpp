#pragma once

#include <safetrack/types.hpp>

#include <vector>

namespace safetrack {

/// Strictly convex inequality-constrained quadratic program
///   min 1/2 zᵀ H z + gᵀ z   s.t.  A z <= b.
struct QpProblem {
  Matrix H;
  Vector g;
  Matrix A;
  Vector b;

  Index n() const { return g.size(); }
  Index constraints() const { return b.size(); }
};

struct QpSolution {
  Vector z;
  Vector dual;  // one multiplier per constraint row, zero when inactive
  std::vector<int> active;
  int iterations = 0;
};

/// Dense active-set solve: equality-KKT subproblems with single add/drop
/// exchanges, falling back to exhaustive active-set enumeration if the
/// exchange loop stalls. Throws QpInfeasibleError on an empty constraint set.
QpSolution solve_qp_active_set(const QpProblem& qp);

/// KKT stationarity residual |H z + g + Aᵀ dual| of a candidate solution.
Scalar qp_stationarity_residual(const QpProblem& qp, const QpSolution& sol);

}  // namespace safetrack
