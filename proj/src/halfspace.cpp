#include <safetrack/halfspace.hpp>

#include <Eigen/Dense>

namespace safetrack {

SafetyFilterOutput project_input(const Vector& u_nominal, const Vector& u_bar,
                                 const Vector& w) {
  SafetyFilterOutput out;
  out.direction = w;
  out.e_v = w;
  out.u_bar = u_bar;
  out.constraint_value = (u_nominal - u_bar).dot(w);
  out.active = out.constraint_value > 0.0;
  if (out.active) {
    out.u = u_nominal - w * (out.constraint_value / w.squaredNorm());
  } else {
    out.u = u_nominal;
  }
  return out;
}

Vector qp_oracle_halfspace(const Vector& u_nominal, const Vector& u_bar,
                           const Vector& w) {
  if (w.squaredNorm() == 0.0) return u_nominal;
  if ((u_nominal - u_bar).dot(w) <= 0.0) return u_nominal;
  const Index m = u_nominal.size();
  Matrix kkt(m + 1, m + 1);
  kkt.setZero();
  kkt.topLeftCorner(m, m) = 2.0 * Matrix::Identity(m, m);
  kkt.topRightCorner(m, 1) = w;
  kkt.bottomLeftCorner(1, m) = w.transpose();
  Vector rhs(m + 1);
  rhs.head(m) = 2.0 * u_nominal;
  rhs[m] = w.dot(u_bar);
  const Vector sol = kkt.fullPivLu().solve(rhs);
  return sol.head(m);
}

}  // namespace safetrack
