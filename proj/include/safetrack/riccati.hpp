#pragma once

#include <safetrack/types.hpp>

namespace safetrack {

/// Stabilizing solution X of the continuous algebraic Riccati equation
///     Aᵀ X + X A − X B R⁻¹ Bᵀ X + Q = 0,
/// computed by the matrix sign function iteration on the Hamiltonian with
/// determinant scaling. Deterministic; throws RiccatiError when no
/// stabilizing solution exists or the iteration fails to converge.
Matrix care_stabilizing(const Matrix& A, const Matrix& B, const Matrix& Q,
                        const Matrix& R);

/// Residual Aᵀ X + X A − X B R⁻¹ Bᵀ X + Q of a candidate solution.
Matrix care_residual(const Matrix& A, const Matrix& B, const Matrix& Q,
                     const Matrix& R, const Matrix& X);

}  // namespace safetrack
