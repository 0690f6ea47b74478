#include "letc/transform.hpp"

#include "letc/error.hpp"

#include <string>

namespace letc {

LinearTransform::LinearTransform(Matrix forward, double scale, double tolerance)
    : forward_(std::move(forward)), scale_(scale) {
  if (forward_.rows() == 0 || forward_.rows() != forward_.cols())
    throw ParameterError("LinearTransform: matrix must be square and non-empty");
  if (!(scale_ > 0.0)) throw ParameterError("LinearTransform: scale must be > 0");
  if (!forward_.allFinite()) throw ParameterError("LinearTransform: non-finite entries");

  const auto n = forward_.rows();
  const Matrix target = scale_ * Matrix::Identity(n, n);
  const double left = (forward_ * forward_.transpose() - target).cwiseAbs().maxCoeff();
  const double right = (forward_.transpose() * forward_ - target).cwiseAbs().maxCoeff();
  if (std::max(left, right) > tolerance * scale_) {
    throw ParameterError("LinearTransform: L Lᵀ deviates from l·I by " +
                         std::to_string(std::max(left, right)));
  }
}

LinearTransform LinearTransform::identity(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return LinearTransform(Matrix::Identity(m, m));
}

namespace {

void require_fiber_length(const Tensor3& x, const LinearTransform& t, const char* what) {
  if (x.dim3() != t.size()) {
    throw ShapeError(std::string(what) + ": tensor has n3 = " + std::to_string(x.dim3()) +
                     " but transform is " + std::to_string(t.size()) + "x" +
                     std::to_string(t.size()));
  }
}

}  // namespace

Tensor3 mode3_transform(const Tensor3& x, const LinearTransform& t) {
  require_fiber_length(x, t, "mode3_transform");
  Tensor3 out(x.dim1(), x.dim2(), x.dim3());
  // Fibers are rows of the (n1 n2) x n3 view, so L·fiber is row·Lᵀ.
  out.fibers().noalias() = x.fibers() * t.forward().transpose();
  return out;
}

Tensor3 mode3_inverse_transform(const Tensor3& x, const LinearTransform& t) {
  require_fiber_length(x, t, "mode3_inverse_transform");
  Tensor3 out(x.dim1(), x.dim2(), x.dim3());
  out.fibers().noalias() = x.fibers() * t.forward();
  if (t.scale() != 1.0) out *= 1.0 / t.scale();
  return out;
}

}  // namespace letc
