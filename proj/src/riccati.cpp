#include <safetrack/riccati.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace safetrack {

Matrix care_residual(const Matrix& A, const Matrix& B, const Matrix& Q,
                     const Matrix& R, const Matrix& X) {
  const Matrix rinv_bt_x = R.llt().solve(B.transpose() * X);
  return A.transpose() * X + X * A - X * B * rinv_bt_x + Q;
}

Matrix care_stabilizing(const Matrix& A, const Matrix& B, const Matrix& Q,
                        const Matrix& R) {
  const Index n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols())
    throw RiccatiError("care: dimension mismatch");

  Eigen::LLT<Matrix> r_chol(R);
  if (r_chol.info() != Eigen::Success)
    throw RiccatiError("care: R must be positive definite");

  Matrix hamiltonian(2 * n, 2 * n);
  hamiltonian << A, B * r_chol.solve(B.transpose()), Q, -A.transpose();

  // A singular Hamiltonian has an eigenvalue on the imaginary axis, so no
  // stabilizing solution exists.
  if (std::abs(hamiltonian.determinant()) < 1e-300)
    throw RiccatiError("care: Hamiltonian is singular (not stabilizable/detectable)");

  // Matrix sign iteration with determinant scaling (Byers 1987).
  Matrix z = hamiltonian;
  const double p = static_cast<double>(z.rows());
  const double tolerance = 1e-11;
  const int max_iterations = 120;
  double relative_norm = std::numeric_limits<double>::infinity();
  for (int iteration = 0; iteration < max_iterations && relative_norm > tolerance;
       ++iteration) {
    const Matrix z_old = z;
    const double det = std::abs(z.determinant());
    if (!(det > 0) || !std::isfinite(det))
      throw RiccatiError("care: sign iteration hit a singular iterate");
    z *= std::pow(det, -1.0 / p);
    z = z - 0.5 * (z - z.inverse());
    relative_norm = (z - z_old).norm();
  }
  if (!(relative_norm <= tolerance * 10))
    throw RiccatiError("care: sign iteration did not converge");

  const Matrix w11 = z.block(0, 0, n, n);
  const Matrix w12 = z.block(0, n, n, n);
  const Matrix w21 = z.block(n, 0, n, n);
  const Matrix w22 = z.block(n, n, n, n);

  Matrix lhs(2 * n, n), rhs(2 * n, n);
  const Matrix eye = Matrix::Identity(n, n);
  lhs << w12, w22 + eye;
  rhs << w11 + eye, w21;
  Eigen::JacobiSVD<Matrix> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix x = svd.solve(rhs);
  x = 0.5 * (x + x.transpose()).eval();

  const double residual = care_residual(A, B, Q, R, x).norm();
  const double scale = 1.0 + Q.norm() + x.norm();
  if (!(residual <= 1e-8 * scale) || !x.allFinite())
    throw RiccatiError("care: solution residual too large");

  const Matrix closed_loop = A - B * r_chol.solve(B.transpose() * x);
  Eigen::EigenSolver<Matrix> es(closed_loop);
  if (es.eigenvalues().real().maxCoeff() > 0)
    throw RiccatiError("care: solution is not stabilizing");
  return x;
}

}  // namespace safetrack
