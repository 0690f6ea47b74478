#pragma once

#include "letc/tensor.hpp"

namespace letc {

/// Invertible transform applied along the third tensor mode.
///
/// Holds a real n3 x n3 matrix L with L Lᵀ = Lᵀ L = l·I. The forward
/// operator maps each tubal fiber x(i, j, :) to L x(i, j, :); the inverse
/// applies Lᵀ / l.
class LinearTransform {
 public:
  /// Throws ParameterError if `forward` is not square, `scale <= 0`, or the
  /// orthogonality residual max|L Lᵀ − l I| exceeds `tolerance * l`.
  explicit LinearTransform(Matrix forward, double scale = 1.0, double tolerance = 1e-10);

  static LinearTransform identity(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(forward_.rows()); }
  const Matrix& forward() const noexcept { return forward_; }
  Matrix inverse() const { return forward_.transpose() / scale_; }
  double scale() const noexcept { return scale_; }

 private:
  Matrix forward_;
  double scale_;
};

/// x ×₃ L: output(i, j, :) = L · x(i, j, :).
Tensor3 mode3_transform(const Tensor3& x, const LinearTransform& t);

/// x ×₃ (Lᵀ / l); mode3_inverse_transform(mode3_transform(x, t), t) == x.
Tensor3 mode3_inverse_transform(const Tensor3& x, const LinearTransform& t);

}  // namespace letc
