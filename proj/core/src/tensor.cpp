#include "letc/tensor.hpp"

#include "letc/error.hpp"

#include <cmath>
#include <string>

namespace letc {

Tensor3::Tensor3(std::size_t n1, std::size_t n2, std::size_t n3, double fill)
    : n1_(n1), n2_(n2), n3_(n3) {
  if (n1 == 0 || n2 == 0 || n3 == 0) {
    throw ShapeError("Tensor3: every dimension must be >= 1, got (" + std::to_string(n1) +
                     ", " + std::to_string(n2) + ", " + std::to_string(n3) + ")");
  }
  data_.assign(n1 * n2 * n3, fill);
}

MatrixMap Tensor3::slice(std::size_t k) {
  return MatrixMap(data_.data() + k * n1_ * n2_, static_cast<Eigen::Index>(n1_),
                   static_cast<Eigen::Index>(n2_));
}

ConstMatrixMap Tensor3::slice(std::size_t k) const {
  return ConstMatrixMap(data_.data() + k * n1_ * n2_, static_cast<Eigen::Index>(n1_),
                        static_cast<Eigen::Index>(n2_));
}

MatrixMap Tensor3::fibers() {
  return MatrixMap(data_.data(), static_cast<Eigen::Index>(n1_ * n2_),
                   static_cast<Eigen::Index>(n3_));
}

ConstMatrixMap Tensor3::fibers() const {
  return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(n1_ * n2_),
                        static_cast<Eigen::Index>(n3_));
}

double Tensor3::frobenius_norm() const {
  return Eigen::Map<const Vector>(data_.data(), static_cast<Eigen::Index>(data_.size())).norm();
}

bool Tensor3::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  require_same_shape(*this, other, "Tensor3::operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  require_same_shape(*this, other, "Tensor3::operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

void require_same_shape(const Tensor3& a, const Tensor3& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a.dim1()) + "x" +
                     std::to_string(a.dim2()) + "x" + std::to_string(a.dim3()) + " vs " +
                     std::to_string(b.dim1()) + "x" + std::to_string(b.dim2()) + "x" +
                     std::to_string(b.dim3()) + ")");
  }
}

double relative_error(const Tensor3& a, const Tensor3& b) {
  require_same_shape(a, b, "relative_error");
  const double denom = b.frobenius_norm();
  const double diff = (a - b).frobenius_norm();
  return denom > 0.0 ? diff / denom : diff;
}

Tensor3 tensorize(const Matrix& z, std::size_t intervals_per_day) {
  const auto rows = static_cast<std::size_t>(z.rows());
  if (intervals_per_day == 0 || rows == 0 || z.cols() == 0 || rows % intervals_per_day != 0) {
    throw ShapeError("tensorize: row count " + std::to_string(rows) +
                     " is not a positive multiple of intervals_per_day " +
                     std::to_string(intervals_per_day));
  }
  const std::size_t days = rows / intervals_per_day;
  const auto ipd = static_cast<Eigen::Index>(intervals_per_day);
  Tensor3 x(intervals_per_day, static_cast<std::size_t>(z.cols()), days);
  for (std::size_t k = 0; k < days; ++k)
    x.slice(k) = z.middleRows(static_cast<Eigen::Index>(k) * ipd, ipd);
  return x;
}

Matrix matricize(const Tensor3& x) {
  const auto n1 = static_cast<Eigen::Index>(x.dim1());
  Matrix z(n1 * static_cast<Eigen::Index>(x.dim3()), static_cast<Eigen::Index>(x.dim2()));
  for (std::size_t k = 0; k < x.dim3(); ++k)
    z.middleRows(static_cast<Eigen::Index>(k) * n1, n1) = x.slice(k);
  return z;
}

}  // namespace letc
