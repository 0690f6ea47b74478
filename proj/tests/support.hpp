#pragma once

#include "letc/letc.hpp"

#include <Eigen/QR>

#include <random>
#include <vector>

namespace letc::testing {

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Eigen::Index q = 0; q < m.size(); ++q) m(q) = g(rng);
  return m;
}

inline Tensor3 gaussian(std::size_t n1, std::size_t n2, std::size_t n3, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Tensor3 t(n1, n2, n3);
  for (std::size_t q = 0; q < t.size(); ++q) t.data()[q] = g(rng);
  return t;
}

inline LinearTransform random_orthonormal(std::size_t n, std::mt19937_64& rng) {
  const auto k = static_cast<Eigen::Index>(n);
  Eigen::HouseholderQR<Matrix> qr(gaussian(k, k, rng));
  return LinearTransform(qr.householderQ() * Matrix::Identity(k, k));
}

// Tensor whose transformed slices have rank r.
inline Tensor3 low_rank(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t r,
                        const LinearTransform& t, std::mt19937_64& rng) {
  Tensor3 spectral(n1, n2, n3);
  for (std::size_t k = 0; k < n3; ++k) {
    spectral.slice(k) = gaussian(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(r), rng) *
                        gaussian(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n2), rng);
  }
  return mode3_inverse_transform(spectral, t);
}

// Directed graph where each ordered pair is an edge with probability p.
inline SparseMatrix random_digraph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng)) trips.emplace_back(static_cast<int>(i), static_cast<int>(j), w(rng));
  SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

// Row sums taken as (off-diagonals left to right) + diagonal, the order in
// which the Laplacian diagonals are built, so a balanced row gives exactly 0.
inline Vector ordered_row_sums(const Matrix& m) {
  Vector out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (j != i) off += m(i, j);
    out(i) = off + m(i, i);
  }
  return out;
}

inline double rel(const Matrix& a, const Matrix& b) {
  const double nb = b.norm();
  return nb > 0.0 ? (a - b).norm() / nb : a.norm();
}

}  // namespace letc::testing
