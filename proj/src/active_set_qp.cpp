#include <safetrack/active_set_qp.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>

namespace safetrack {

namespace {

constexpr Scalar kFeasTol = 1e-9;
constexpr Scalar kDualTol = 1e-10;

struct EqSolve {
  Vector z;
  Vector mu;  // multipliers of the working rows
  bool ok = false;
};

// Solve the equality-constrained subproblem with the working set rows tight.
EqSolve solve_working_set(const QpProblem& qp, const std::vector<int>& working) {
  const Index n = qp.n();
  const Index k = static_cast<Index>(working.size());
  Matrix kkt(n + k, n + k);
  kkt.setZero();
  kkt.topLeftCorner(n, n) = qp.H;
  Vector rhs(n + k);
  rhs.head(n) = -qp.g;
  for (Index row = 0; row < k; ++row) {
    kkt.block(n + row, 0, 1, n) = qp.A.row(working[row]);
    kkt.block(0, n + row, n, 1) = qp.A.row(working[row]).transpose();
    rhs[n + row] = qp.b[working[row]];
  }
  Eigen::FullPivLU<Matrix> lu(kkt);
  EqSolve out;
  if (!lu.isInvertible()) return out;
  const Vector sol = lu.solve(rhs);
  out.z = sol.head(n);
  out.mu = sol.tail(k);
  out.ok = sol.allFinite();
  return out;
}

bool primal_feasible(const QpProblem& qp, const Vector& z, Scalar scale) {
  return ((qp.A * z - qp.b).array() <= kFeasTol * scale).all();
}

Scalar objective(const QpProblem& qp, const Vector& z) {
  return 0.5 * z.dot(qp.H * z) + qp.g.dot(z);
}

QpSolution pack(const QpProblem& qp, const Vector& z, const Vector& mu,
                const std::vector<int>& working, int iterations) {
  QpSolution sol;
  sol.z = z;
  sol.dual = Vector::Zero(qp.constraints());
  for (std::size_t row = 0; row < working.size(); ++row)
    sol.dual[working[row]] = mu[static_cast<Index>(row)];
  sol.active = working;
  sol.iterations = iterations;
  return sol;
}

// Exhaustive enumeration over candidate active sets; exact for small
// constraint counts and the last resort when the exchange loop cycles.
std::optional<QpSolution> enumerate_active_sets(const QpProblem& qp, Scalar scale) {
  const int c = static_cast<int>(qp.constraints());
  if (c > 20) return std::nullopt;
  std::optional<QpSolution> best;
  Scalar best_objective = std::numeric_limits<Scalar>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << c); ++mask) {
    std::vector<int> working;
    for (int j = 0; j < c; ++j)
      if (mask & (1u << j)) working.push_back(j);
    if (static_cast<Index>(working.size()) > qp.n()) continue;
    const EqSolve eq = solve_working_set(qp, working);
    if (!eq.ok) continue;
    if (!primal_feasible(qp, eq.z, scale)) continue;
    if (working.size() > 0 && eq.mu.minCoeff() < -kDualTol * scale) continue;
    const Scalar value = objective(qp, eq.z);
    if (value < best_objective) {
      best_objective = value;
      best = pack(qp, eq.z, eq.mu, working, -1);
    }
  }
  return best;
}

}  // namespace

QpSolution solve_qp_active_set(const QpProblem& qp) {
  if (qp.H.rows() != qp.n() || qp.H.cols() != qp.n() || qp.A.rows() != qp.constraints() ||
      (qp.constraints() > 0 && qp.A.cols() != qp.n()))
    throw ValidationError("qp: dimension mismatch");
  const Scalar norm_scale =
      1.0 + (qp.constraints() > 0 ? qp.b.cwiseAbs().maxCoeff() : 0.0) +
      qp.g.cwiseAbs().maxCoeff();

  std::vector<int> working;
  const int cap = 40 + 4 * static_cast<int>(qp.constraints());
  for (int iteration = 0; iteration < cap; ++iteration) {
    const EqSolve eq = solve_working_set(qp, working);
    if (!eq.ok) break;  // dependent working rows; let enumeration sort it out

    // Drop the most negative multiplier first.
    if (working.size() > 0) {
      Index drop = -1;
      Scalar most_negative = -kDualTol * norm_scale;
      for (Index row = 0; row < eq.mu.size(); ++row) {
        if (eq.mu[row] < most_negative) {
          most_negative = eq.mu[row];
          drop = row;
        }
      }
      if (drop >= 0) {
        working.erase(working.begin() + drop);
        continue;
      }
    }

    // Then add the most violated row.
    int add = -1;
    Scalar worst = kFeasTol * norm_scale;
    const Vector violation = qp.A * eq.z - qp.b;
    for (int j = 0; j < static_cast<int>(qp.constraints()); ++j) {
      if (std::find(working.begin(), working.end(), j) != working.end()) continue;
      if (violation[j] > worst) {
        worst = violation[j];
        add = j;
      }
    }
    if (add < 0) return pack(qp, eq.z, eq.mu, working, iteration + 1);
    working.push_back(add);
    std::sort(working.begin(), working.end());
  }

  const auto fallback = enumerate_active_sets(qp, norm_scale);
  if (!fallback.has_value())
    throw QpInfeasibleError("qp: no feasible active set (constraint set empty)");
  return *fallback;
}

Scalar qp_stationarity_residual(const QpProblem& qp, const QpSolution& sol) {
  Vector grad = qp.H * sol.z + qp.g;
  if (qp.constraints() > 0) grad += qp.A.transpose() * sol.dual;
  return grad.norm();
}

}  // namespace safetrack
