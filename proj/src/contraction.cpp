#include <safetrack/contraction.hpp>

#include <safetrack/riccati.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace safetrack {

Matrix metric_pointwise(const Matrix& A_d, const Matrix& B, const Matrix& R,
                        Scalar k_v, const Matrix& Q) {
  const Index n = A_d.rows();
  const Matrix a_shift = A_d + 0.5 * k_v * Matrix::Identity(n, n);
  // Halving R doubles the quadratic term of the standard CARE.
  return care_stabilizing(a_shift, B, Q, 0.5 * R);
}

Scalar incremental_energy(const Vector& v, const Vector& v_d, const Matrix& M) {
  const Vector e = v - v_d;
  return 0.5 * e.dot(M * e);
}

namespace {

Matrix contraction_matrix(const Matrix& M, const Matrix& M_dot, const Matrix& A,
                          const Matrix& B, const Matrix& R, Scalar k_v) {
  const Matrix bt_m = B.transpose() * M;
  const Matrix feedback = 2.0 * bt_m.transpose() * R.llt().solve(bt_m);
  return M_dot + M * A + A.transpose() * M - feedback + k_v * M;
}

}  // namespace

Scalar verify_contraction_along_trajectory(const std::vector<TrajectorySample>& traj,
                                           const AffinePlant& plant,
                                           const FilterGains& gains,
                                           Scalar claimed_k_v) {
  if (traj.size() < 3)
    throw ValidationError("verify_contraction: need at least three samples");
  const Scalar rate = claimed_k_v >= 0 ? claimed_k_v : gains.k_v;
  const Index n = plant.dim_state;
  const Matrix R = gains.r_or_identity(plant.dim_input);
  const Matrix Q = gains.q_margin * Matrix::Identity(n, n);

  std::vector<Matrix> metrics(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const TrajectorySample& s = traj[k];
    const Matrix a_d = sdc_factorize(plant, s.p, s.v, s.v_d, s.t);
    metrics[k] = metric_pointwise(a_d, plant.actuation(s.p, s.v, s.t), R, gains.k_v, Q);
  }

  Scalar worst = -std::numeric_limits<Scalar>::infinity();
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const Scalar dt = traj[k + 1].t - traj[k - 1].t;
    const Matrix m_dot = (metrics[k + 1] - metrics[k - 1]) / dt;
    const TrajectorySample& s = traj[k];
    const Matrix a_d = sdc_factorize(plant, s.p, s.v, s.v_d, s.t);
    const Matrix lhs = contraction_matrix(metrics[k], m_dot, a_d,
                                          plant.actuation(s.p, s.v, s.t), R, rate);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (lhs + lhs.transpose()));
    worst = std::max(worst, es.eigenvalues().maxCoeff());
  }
  return worst;
}

}  // namespace safetrack
