#pragma once

#include "letc/transform.hpp"

#include <cstdint>
#include <random>

namespace letc {

/// Transform-domain t-SVD M = U *_L S *_L Vᵀ, r = min(n1, n2).
///
/// Factors are held in the transformed (spectral) domain: slice k of `u`,
/// `s` and `v` are the SVD factors of the k-th transformed frontal slice of M.
/// Singular values are non-increasing down each diagonal of `s`; the entry of
/// largest magnitude in every left singular vector is nonnegative.
struct TSvdFactors {
  Tensor3 u;  // n1 x r x n3
  Tensor3 s;  // r x r x n3, f-diagonal
  Tensor3 v;  // n2 x r x n3
  LinearTransform transform;
};

/// Output of a thresholding step together with the t-TNN of the result,
/// which falls out of the thresholded singular values for free.
struct SvtResult {
  Tensor3 value;
  double tnn = 0.0;
};

/// Parameters of the randomized thresholding operator.
struct SketchParams {
  std::size_t rank = 10;       // k, 1 <= k < min(n1, n2)
  std::size_t power_iters = 1;  // p
  std::size_t oversample = 10;  // s
};

/// Slice-wise product in the transformed domain. Shapes: a is n1 x m x n3,
/// b is m x n2 x n3.
Tensor3 t_product(const Tensor3& a, const Tensor3& b, const LinearTransform& t,
                  unsigned threads = 1);

/// Tensor transpose consistent with t_product: each frontal slice is
/// transposed. Valid for any real transform applied along mode 3.
Tensor3 t_transpose(const Tensor3& a);

TSvdFactors t_svd(const Tensor3& m, const LinearTransform& t, unsigned threads = 1);

/// U *_L S *_L Vᵀ mapped back to the original domain.
Tensor3 t_svd_reconstruct(const TSvdFactors& f);

/// Transform-induced tensor nuclear norm: sum of nuclear norms of the
/// transformed frontal slices.
double t_tnn(const Tensor3& x, const LinearTransform& t, unsigned threads = 1);

/// Proximal operator of ‖·‖_{t*}: soft-thresholds the singular values of
/// every transformed slice by `threshold` and maps back.
Tensor3 t_svt(const Tensor3& m, const LinearTransform& t, double threshold,
              unsigned threads = 1);
SvtResult t_svt_with_norm(const Tensor3& m, const LinearTransform& t, double threshold,
                          unsigned threads = 1);

/// Randomized approximation of t_svt. One Gaussian test matrix of shape
/// n1 x (k + s) is drawn from `rng` and shared across slices; each transposed
/// slice is sketched, refined by `power_iters` subspace iterations, and
/// thresholded through the small (k + s) x n1 factor.
Tensor3 randomized_t_svt(const Tensor3& m, const LinearTransform& t, double threshold,
                         const SketchParams& sketch, std::mt19937_64& rng,
                         unsigned threads = 1);
Tensor3 randomized_t_svt(const Tensor3& m, const LinearTransform& t, double threshold,
                         const SketchParams& sketch, std::uint64_t seed,
                         unsigned threads = 1);
SvtResult randomized_t_svt_with_norm(const Tensor3& m, const LinearTransform& t,
                                     double threshold, const SketchParams& sketch,
                                     std::mt19937_64& rng, unsigned threads = 1);

/// Flips paired singular vectors so the largest-magnitude entry of each
/// column of `u` is nonnegative (first such entry on ties).
void canonicalize_signs(Matrix& u, Matrix& v);

}  // namespace letc
