#include "letc/tsvd.hpp"

#include "letc/error.hpp"
#include "letc/parallel.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <string>

namespace letc {
namespace {

struct Thresholded {
  Matrix value;
  double nuclear = 0.0;
};

bool is_zero(const Eigen::Ref<const Matrix>& a) {
  return a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0;
}

// Matrix singular value thresholding: U [Σ − τ]₊ Vᵀ.
Thresholded soft_threshold(const Eigen::Ref<const Matrix>& a, double threshold) {
  Thresholded out{Matrix::Zero(a.rows(), a.cols()), 0.0};
  if (is_zero(a)) return out;

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("t_svt: SVD did not converge");
  const Vector& sigma = svd.singularValues();
  Eigen::Index kept = 0;
  while (kept < sigma.size() && sigma(kept) > threshold) ++kept;
  if (kept == 0) return out;

  const Vector shrunk = sigma.head(kept).array() - threshold;
  out.value.noalias() =
      svd.matrixU().leftCols(kept) * shrunk.asDiagonal() * svd.matrixV().leftCols(kept).transpose();
  out.nuclear = shrunk.sum();
  return out;
}

// Orthonormal basis for the column space of g (thin Householder Q).
Matrix orthonormal_basis(const Matrix& g) {
  Eigen::HouseholderQR<Matrix> qr(g);
  const Eigen::Index cols = std::min(g.rows(), g.cols());
  return qr.householderQ() * Matrix::Identity(g.rows(), cols);
}

void require_threshold(double threshold, const char* what) {
  if (!(threshold >= 0.0))
    throw ParameterError(std::string(what) + ": threshold must be >= 0");
}

}  // namespace

void canonicalize_signs(Matrix& u, Matrix& v) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      if (std::abs(u(r, c)) > best) {
        best = std::abs(u(r, c));
        arg = r;
      }
    }
    if (u.rows() > 0 && u(arg, c) < 0.0) {
      u.col(c) = -u.col(c);
      if (c < v.cols()) v.col(c) = -v.col(c);
    }
  }
}

Tensor3 t_transpose(const Tensor3& a) {
  Tensor3 out(a.dim2(), a.dim1(), a.dim3());
  for (std::size_t k = 0; k < a.dim3(); ++k) out.slice(k) = a.slice(k).transpose();
  return out;
}

Tensor3 t_product(const Tensor3& a, const Tensor3& b, const LinearTransform& t, unsigned threads) {
  if (a.dim2() != b.dim1() || a.dim3() != b.dim3()) {
    throw ShapeError("t_product: inner dimensions disagree (" + std::to_string(a.dim2()) +
                     " vs " + std::to_string(b.dim1()) + ") or n3 differs");
  }
  const Tensor3 abar = mode3_transform(a, t);
  const Tensor3 bbar = mode3_transform(b, t);
  Tensor3 cbar(a.dim1(), b.dim2(), a.dim3());
  parallel_for(a.dim3(), threads,
               [&](std::size_t k) { cbar.slice(k).noalias() = abar.slice(k) * bbar.slice(k); });
  return mode3_inverse_transform(cbar, t);
}

TSvdFactors t_svd(const Tensor3& m, const LinearTransform& t, unsigned threads) {
  const Tensor3 mbar = mode3_transform(m, t);
  const std::size_t r = std::min(m.dim1(), m.dim2());
  TSvdFactors f{Tensor3(m.dim1(), r, m.dim3()), Tensor3(r, r, m.dim3()),
                Tensor3(m.dim2(), r, m.dim3()), t};

  parallel_for(m.dim3(), threads, [&](std::size_t k) {
    const auto slice = mbar.slice(k);
    if (is_zero(slice)) {
      // Degenerate slice: any orthonormal pair works with zero singular values.
      const auto ri = static_cast<Eigen::Index>(r);
      f.u.slice(k) = Matrix::Identity(slice.rows(), ri);
      f.v.slice(k) = Matrix::Identity(slice.cols(), ri);
      return;
    }
    Eigen::BDCSVD<Matrix> svd(slice, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericError("t_svd: SVD did not converge");
    Matrix u = svd.matrixU();
    Matrix v = svd.matrixV();
    canonicalize_signs(u, v);
    f.u.slice(k) = u;
    f.v.slice(k) = v;
    f.s.slice(k) = svd.singularValues().asDiagonal();
  });
  return f;
}

Tensor3 t_svd_reconstruct(const TSvdFactors& f) {
  Tensor3 mbar(f.u.dim1(), f.v.dim1(), f.u.dim3());
  for (std::size_t k = 0; k < f.u.dim3(); ++k)
    mbar.slice(k).noalias() = f.u.slice(k) * f.s.slice(k) * f.v.slice(k).transpose();
  return mode3_inverse_transform(mbar, f.transform);
}

double t_tnn(const Tensor3& x, const LinearTransform& t, unsigned threads) {
  const Tensor3 xbar = mode3_transform(x, t);
  std::vector<double> per_slice(x.dim3(), 0.0);
  parallel_for(x.dim3(), threads, [&](std::size_t k) {
    const auto slice = xbar.slice(k);
    if (is_zero(slice)) return;
    Eigen::BDCSVD<Matrix> svd(slice);
    per_slice[k] = svd.singularValues().sum();
  });
  double total = 0.0;
  for (double v : per_slice) total += v;
  return total;
}

SvtResult t_svt_with_norm(const Tensor3& m, const LinearTransform& t, double threshold,
                          unsigned threads) {
  require_threshold(threshold, "t_svt");
  const Tensor3 mbar = mode3_transform(m, t);
  Tensor3 out(m.dim1(), m.dim2(), m.dim3());
  std::vector<double> per_slice(m.dim3(), 0.0);
  parallel_for(m.dim3(), threads, [&](std::size_t k) {
    Thresholded s = soft_threshold(mbar.slice(k), threshold);
    out.slice(k) = s.value;
    per_slice[k] = s.nuclear;
  });
  SvtResult result{mode3_inverse_transform(out, t), 0.0};
  for (double v : per_slice) result.tnn += v;
  return result;
}

Tensor3 t_svt(const Tensor3& m, const LinearTransform& t, double threshold, unsigned threads) {
  return t_svt_with_norm(m, t, threshold, threads).value;
}

SvtResult randomized_t_svt_with_norm(const Tensor3& m, const LinearTransform& t,
                                     double threshold, const SketchParams& sketch,
                                     std::mt19937_64& rng, unsigned threads) {
  require_threshold(threshold, "randomized_t_svt");
  const std::size_t n1 = m.dim1();
  const std::size_t n2 = m.dim2();
  if (sketch.rank < 1 || sketch.rank >= std::min(n1, n2)) {
    throw ParameterError("randomized_t_svt: rank " + std::to_string(sketch.rank) +
                         " outside [1, min(n1, n2)) = [1, " + std::to_string(std::min(n1, n2)) +
                         ")");
  }

  const Tensor3 abar = mode3_transform(m, t);

  const auto width = static_cast<Eigen::Index>(sketch.rank + sketch.oversample);
  Matrix omega(static_cast<Eigen::Index>(n1), width);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index c = 0; c < omega.cols(); ++c)
    for (Eigen::Index r = 0; r < omega.rows(); ++r) omega(r, c) = gauss(rng);

  Tensor3 out(n1, n2, m.dim3());
  std::vector<double> per_slice(m.dim3(), 0.0);
  parallel_for(m.dim3(), threads, [&](std::size_t k) {
    const auto a = abar.slice(k);  // n1 x n2; the sketch works on aᵀ (n2 x n1)
    if (is_zero(a)) return;
    Matrix q = orthonormal_basis(a.transpose() * omega);
    for (std::size_t p = 0; p < sketch.power_iters; ++p) {
      // Re-orthonormalizing each pass spans the same subspace as (aᵀa)^p aᵀΩ
      // without the loss of small singular directions to rounding.
      const Matrix aq = a * q;
      q = orthonormal_basis(a.transpose() * aq);
    }
    const Matrix b = q.transpose() * a.transpose();  // l x n1
    Thresholded s = soft_threshold(b, threshold);
    out.slice(k).noalias() = (q * s.value).transpose();
    per_slice[k] = s.nuclear;
  });

  SvtResult result{mode3_inverse_transform(out, t), 0.0};
  for (double v : per_slice) result.tnn += v;
  return result;
}

Tensor3 randomized_t_svt(const Tensor3& m, const LinearTransform& t, double threshold,
                         const SketchParams& sketch, std::mt19937_64& rng, unsigned threads) {
  return randomized_t_svt_with_norm(m, t, threshold, sketch, rng, threads).value;
}

Tensor3 randomized_t_svt(const Tensor3& m, const LinearTransform& t, double threshold,
                         const SketchParams& sketch, std::uint64_t seed, unsigned threads) {
  std::mt19937_64 rng(seed);
  return randomized_t_svt(m, t, threshold, sketch, rng, threads);
}

}  // namespace letc
