#pragma once

// Slow, direct reference implementations. Each routine is written from the
// defining formula with dense linear algebra and explicit loops, sharing no
// code path with the library routine it checks.

#include "letc/tensor.hpp"
#include "letc/transform.hpp"

#include <cstddef>

namespace letc::oracle {

/// out(i, j, k) = Σ_q L(k, q) x(i, j, q), by explicit loops.
Tensor3 mode3_apply(const Tensor3& x, const Matrix& l);

/// Transform both operands, multiply slice by slice, transform back.
Tensor3 slice_product(const Tensor3& a, const Tensor3& b, const LinearTransform& t);

/// Nuclear norm of the block-diagonal matrix of transformed slices (one full SVD).
double block_diagonal_nuclear_norm(const Tensor3& x, const LinearTransform& t);

/// Per-slice soft-thresholding built from the eigendecomposition of sᵀs.
Tensor3 per_slice_svt(const Tensor3& m, const LinearTransform& t, double threshold);

/// ‖X‖_{t*} + (μ/2)‖X − M‖²_F evaluated through the block-diagonal nuclear norm.
double svt_objective(const Tensor3& x, const Tensor3& m, const LinearTransform& t, double mu);

/// Direct LU solve of the vectorized Z system
///   (λ1 (L̃ᵀL̃ ⊗ I) + λ2 (I ⊗ RᵀR) + μ I) vec(Z) = vec(rhs)
/// with the Kronecker matrix assembled explicitly.
Matrix kronecker_z_solve(const Matrix& rhs, const Matrix& spatial_laplacian,
                         const Matrix& temporal_operator, double lambda_spatial,
                         double lambda_temporal, double mu);

/// D⁻¹A with a unit self-transition on rows of zero degree; self-loops ignored.
Matrix random_walk_transition(const Matrix& adjacency);

/// Dense LU solve of (I + step·L̃) X̄ = X, X of shape J x N.
Matrix dense_smoother(const Matrix& x, const Matrix& laplacian, double step = 1.0);

/// Unit adjacency of 6 days with a 3-day period, typed in entry by entry.
Matrix six_day_three_period_adjacency();

/// Adjacency with a_ij = 1 when |i − j| is 0, 1 or a positive multiple of T.
Matrix periodic_pattern(std::size_t days, std::size_t period);

/// (τ, −1 × τ, 0, ...) of length T.
Vector temporal_kernel(std::size_t horizon, std::size_t kernel_size);

/// C(k)(r, c) = k((r − c) mod n).
Matrix circulant(const Vector& kernel);

/// Cyclic first-order Toeplitz operator: 1 on the diagonal, −1 below it and
/// in the top-right corner.
Matrix toeplitz_first_order(std::size_t horizon);

/// First differences (T−1) x T: row r has −1 at r and 1 at r + 1.
Matrix quadratic_variation(std::size_t horizon);

/// C(k_τ) C(k_τ)ᵀ by dense multiplication.
Matrix symmetric_circulant(std::size_t horizon, std::size_t kernel_size);

}  // namespace letc::oracle
