#include "letc/oracles.hpp"

#include "letc/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace letc::oracle {

Tensor3 mode3_apply(const Tensor3& x, const Matrix& l) {
  Tensor3 out(x.dim1(), x.dim2(), static_cast<std::size_t>(l.rows()));
  for (std::size_t i = 0; i < x.dim1(); ++i)
    for (std::size_t j = 0; j < x.dim2(); ++j)
      for (std::size_t k = 0; k < out.dim3(); ++k) {
        double s = 0.0;
        for (std::size_t q = 0; q < x.dim3(); ++q)
          s += l(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q)) * x(i, j, q);
        out(i, j, k) = s;
      }
  return out;
}

Tensor3 slice_product(const Tensor3& a, const Tensor3& b, const LinearTransform& t) {
  const Tensor3 ah = mode3_apply(a, t.forward());
  const Tensor3 bh = mode3_apply(b, t.forward());
  Tensor3 ch(a.dim1(), b.dim2(), a.dim3());
  for (std::size_t k = 0; k < a.dim3(); ++k)
    for (std::size_t i = 0; i < a.dim1(); ++i)
      for (std::size_t j = 0; j < b.dim2(); ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < a.dim2(); ++q) s += ah(i, q, k) * bh(q, j, k);
        ch(i, j, k) = s;
      }
  return mode3_apply(ch, t.inverse());
}

double block_diagonal_nuclear_norm(const Tensor3& x, const LinearTransform& t) {
  const Tensor3 xh = mode3_apply(x, t.forward());
  const auto n1 = static_cast<Eigen::Index>(x.dim1());
  const auto n2 = static_cast<Eigen::Index>(x.dim2());
  const auto n3 = static_cast<Eigen::Index>(x.dim3());
  Matrix block = Matrix::Zero(n1 * n3, n2 * n3);
  for (Eigen::Index k = 0; k < n3; ++k)
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = 0; j < n2; ++j)
        block(k * n1 + i, k * n2 + j) =
            xh(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k));
  Eigen::JacobiSVD<Matrix> svd(block);
  return svd.singularValues().sum();
}

Tensor3 per_slice_svt(const Tensor3& m, const LinearTransform& t, double threshold) {
  Tensor3 mh = mode3_apply(m, t.forward());
  Tensor3 out(m.dim1(), m.dim2(), m.dim3());
  for (std::size_t k = 0; k < m.dim3(); ++k) {
    Matrix s(m.dim1(), m.dim2());
    for (std::size_t i = 0; i < m.dim1(); ++i)
      for (std::size_t j = 0; j < m.dim2(); ++j)
        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mh(i, j, k);
    // Right singular vectors and σ² from the eigenpairs of sᵀs; each
    // direction is shrunk by (σ − threshold)₊ / σ.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s.transpose() * s);
    Vector shrink(eig.eigenvalues().size());
    for (Eigen::Index r = 0; r < shrink.size(); ++r) {
      const double sigma = std::sqrt(std::max(eig.eigenvalues()(r), 0.0));
      shrink(r) = sigma > threshold ? (sigma - threshold) / sigma : 0.0;
    }
    const Matrix& v = eig.eigenvectors();
    const Matrix thr = s * v * shrink.asDiagonal() * v.transpose();
    for (std::size_t i = 0; i < m.dim1(); ++i)
      for (std::size_t j = 0; j < m.dim2(); ++j)
        out(i, j, k) = thr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return mode3_apply(out, t.inverse());
}

double svt_objective(const Tensor3& x, const Tensor3& m, const LinearTransform& t, double mu) {
  double sq = 0.0;
  for (std::size_t i = 0; i < x.dim1(); ++i)
    for (std::size_t j = 0; j < x.dim2(); ++j)
      for (std::size_t k = 0; k < x.dim3(); ++k) sq += std::pow(x(i, j, k) - m(i, j, k), 2);
  return block_diagonal_nuclear_norm(x, t) + 0.5 * mu * sq;
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Matrix kronecker_z_solve(const Matrix& rhs, const Matrix& spatial_laplacian,
                         const Matrix& temporal_operator, double lambda_spatial,
                         double lambda_temporal, double mu) {
  const Eigen::Index T = rhs.rows();
  const Eigen::Index J = rhs.cols();
  if (spatial_laplacian.rows() != J || temporal_operator.cols() != T)
    throw ShapeError("kronecker_z_solve: operator sizes do not match rhs");
  const Matrix sg = spatial_laplacian.transpose() * spatial_laplacian;
  const Matrix tg = temporal_operator.transpose() * temporal_operator;
  const Matrix a = lambda_spatial * kron(sg, Matrix::Identity(T, T)) +
                   lambda_temporal * kron(Matrix::Identity(J, J), tg) +
                   mu * Matrix::Identity(T * J, T * J);
  Vector b(T * J);
  for (Eigen::Index j = 0; j < J; ++j)
    for (Eigen::Index i = 0; i < T; ++i) b(j * T + i) = rhs(i, j);
  const Vector z = Eigen::FullPivLU<Matrix>(a).solve(b);
  Matrix out(T, J);
  for (Eigen::Index j = 0; j < J; ++j)
    for (Eigen::Index i = 0; i < T; ++i) out(i, j) = z(j * T + i);
  return out;
}

Matrix random_walk_transition(const Matrix& adjacency) {
  const Eigen::Index n = adjacency.rows();
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double degree = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) degree += adjacency(i, j);
    if (degree == 0.0) {
      p(i, i) = 1.0;
      continue;
    }
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) p(i, j) = adjacency(i, j) / degree;
  }
  return p;
}

Matrix dense_smoother(const Matrix& x, const Matrix& laplacian, double step) {
  const Eigen::Index n = laplacian.rows();
  const Matrix a = Matrix::Identity(n, n) + step * laplacian;
  return Eigen::FullPivLU<Matrix>(a).solve(x);
}

Matrix six_day_three_period_adjacency() {
  Matrix a(6, 6);
  // clang-format off
  a << 1, 1, 0, 1, 0, 0,
       1, 1, 1, 0, 1, 0,
       0, 1, 1, 1, 0, 1,
       1, 0, 1, 1, 1, 0,
       0, 1, 0, 1, 1, 1,
       0, 0, 1, 0, 1, 1;
  // clang-format on
  return a;
}

Matrix periodic_pattern(std::size_t days, std::size_t period) {
  const auto n = static_cast<Eigen::Index>(days);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto gap = static_cast<std::size_t>(std::abs(i - j));
      if (gap <= 1 || gap % period == 0) a(i, j) = 1.0;
    }
  return a;
}

Vector temporal_kernel(std::size_t horizon, std::size_t kernel_size) {
  Vector k = Vector::Zero(static_cast<Eigen::Index>(horizon));
  k(0) = static_cast<double>(kernel_size);
  for (std::size_t q = 1; q <= kernel_size; ++q) k(static_cast<Eigen::Index>(q)) = -1.0;
  return k;
}

Matrix circulant(const Vector& kernel) {
  const Eigen::Index n = kernel.size();
  Matrix c(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index col = 0; col < n; ++col) c(r, col) = kernel(((r - col) % n + n) % n);
  return c;
}

Matrix toeplitz_first_order(std::size_t horizon) {
  const auto n = static_cast<Eigen::Index>(horizon);
  Matrix t = Matrix::Identity(n, n);
  for (Eigen::Index r = 1; r < n; ++r) t(r, r - 1) = -1.0;
  t(0, n - 1) = -1.0;
  return t;
}

Matrix quadratic_variation(std::size_t horizon) {
  const auto n = static_cast<Eigen::Index>(horizon);
  Matrix q = Matrix::Zero(n - 1, n);
  for (Eigen::Index r = 0; r + 1 < n; ++r) {
    q(r, r) = -1.0;
    q(r, r + 1) = 1.0;
  }
  return q;
}

Matrix symmetric_circulant(std::size_t horizon, std::size_t kernel_size) {
  const Matrix c = circulant(temporal_kernel(horizon, kernel_size));
  return c * c.transpose();
}

}  // namespace letc::oracle
