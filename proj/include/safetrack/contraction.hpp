#pragma once

#include <safetrack/dynamics.hpp>
#include <safetrack/gains.hpp>
#include <safetrack/types.hpp>

#include <vector>

namespace safetrack {

/// One metric evaluation. contraction_residual is the largest eigenvalue of
///   Mdot + M A + Aᵀ M − 2 M B R⁻¹ Bᵀ M + k_v M
/// when the verifier has filled it; the pointwise construction guarantees
/// the Mdot-free part equals −Q.
struct MetricEval {
  Matrix M;
  Matrix M_dot;
  Scalar contraction_residual = 0.0;
};

/// Pointwise metric: the stabilizing solution M of
///   (A + (k_v/2) I)ᵀ M + M (A + (k_v/2) I) − 2 M B R⁻¹ Bᵀ M + Q = 0,
/// so that M A + Aᵀ M − 2 M B R⁻¹ Bᵀ M + k_v M = −Q. Throws RiccatiError
/// when no stabilizing solution exists at the queried point.
Matrix metric_pointwise(const Matrix& A_d, const Matrix& B, const Matrix& R,
                        Scalar k_v, const Matrix& Q);

/// Half the metric-weighted squared velocity error.
Scalar incremental_energy(const Vector& v, const Vector& v_d, const Matrix& M);

struct TrajectorySample {
  Scalar t = 0.0;
  Vector p, v, v_d;
};

/// Worst-case (largest) eigenvalue over the trajectory of
///   Mdot + M A + Aᵀ M − 2 M B R⁻¹ Bᵀ M + k_v M,
/// with Mdot estimated by central differences of M along the samples.
/// Nonpositive values certify the contraction inequality numerically.
/// The metric is built at gains.k_v; claimed_k_v, when nonnegative,
/// substitutes the rate the inequality is checked against, so an
/// overstated decay claim is reported as a positive residual.
Scalar verify_contraction_along_trajectory(const std::vector<TrajectorySample>& traj,
                                           const AffinePlant& plant,
                                           const FilterGains& gains,
                                           Scalar claimed_k_v = -1.0);

}  // namespace safetrack
