#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <vector>

namespace letc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Dense third-order tensor of shape (n1, n2, n3).
///
/// Storage is column-major with frontal slices contiguous: entry (i, j, k)
/// lives at `i + n1 * (j + n2 * k)`, so `slice(k)` is a zero-copy n1 x n2
/// matrix view. In the solver the axes are (time of day, location, day).
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t n1, std::size_t n2, std::size_t n3, double fill = 0.0);

  static Tensor3 zeros(std::size_t n1, std::size_t n2, std::size_t n3) {
    return Tensor3(n1, n2, n3);
  }

  std::size_t dim1() const noexcept { return n1_; }
  std::size_t dim2() const noexcept { return n2_; }
  std::size_t dim3() const noexcept { return n3_; }
  std::array<std::size_t, 3> shape() const noexcept { return {n1_, n2_, n3_}; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[i + n1_ * (j + n2_ * k)];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[i + n1_ * (j + n2_ * k)];
  }

  MatrixMap slice(std::size_t k);
  ConstMatrixMap slice(std::size_t k) const;

  /// (n1 * n2) x n3 view whose row i + n1*j is the tubal fiber (i, j, :).
  MatrixMap fibers();
  ConstMatrixMap fibers() const;

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  double frobenius_norm() const;
  bool all_finite() const;

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double s);

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(Tensor3 a, double s) { return a *= s; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  std::size_t n3_ = 0;
  std::vector<double> data_;
};

/// Throws ShapeError unless a and b have identical shapes.
void require_same_shape(const Tensor3& a, const Tensor3& b, const char* what);

/// ‖a − b‖_F / ‖b‖_F, or ‖a‖_F when b is zero.
double relative_error(const Tensor3& a, const Tensor3& b);

/// Folds an (I*K) x J matrix into an I x J x K tensor with days stacked as
/// contiguous row blocks: X(i, j, k) = Z(k*I + i, j).
Tensor3 tensorize(const Matrix& z, std::size_t intervals_per_day);

/// Exact inverse of tensorize.
Matrix matricize(const Tensor3& x);

}  // namespace letc
