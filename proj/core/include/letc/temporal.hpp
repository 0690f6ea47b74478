#pragma once

#include "letc/tensor.hpp"
#include "letc/transform.hpp"

#include <cstddef>
#include <optional>

namespace letc {

/// Lap = Diag(row sums of w) − w. Throws ParameterError on negative or
/// non-finite weights, ShapeError when w is not square.
Matrix graph_laplacian(const Matrix& w);

/// Separate day-to-day weight for the last `days` days of each period
/// (weekends). The subdiagonal weights repeat the pattern
/// H = Diag(ω1 × (T − 2T_w + 1), ω2 × (2T_w − 1)) once per period.
struct WeekendPattern {
  double weight = 1.0;     // ω2
  std::size_t days = 2;    // T_w
};

struct TemporalAdjacencyParams {
  std::size_t days = 1;          // D
  std::size_t period = 7;        // T
  double day_weight = 1.0;       // ω1
  double period_weight = 1.0;    // ωT
  std::optional<double> decay;   // β: n-th period weight β(1−β)ⁿ ωT, n = 1..m
  std::optional<WeekendPattern> weekend;
};

/// Undirected day graph encoding consecutive-day and same-day-of-period
/// similarity, with its Laplacian eigendecomposition.
struct TemporalPeriodicGraph {
  TemporalAdjacencyParams params;
  Matrix adjacency;     // D x D, symmetric, nonnegative, unit diagonal
  Matrix laplacian;     // Diag(row sums) − adjacency
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // columns orthonormal, sign-canonical
};

TemporalPeriodicGraph build_temporal_adjacency(const TemporalAdjacencyParams& params);
TemporalPeriodicGraph build_temporal_adjacency(std::size_t days, std::size_t period,
                                               double day_weight, double period_weight,
                                               std::optional<double> decay = std::nullopt,
                                               std::optional<WeekendPattern> weekend = std::nullopt);

/// Temporal graph Fourier transform: forward = Uᵀ, inverse = U, l = 1.
LinearTransform tgft_transform(const TemporalPeriodicGraph& g);

/// Which operator the temporal consistency penalty ‖R Z‖²_F uses.
enum class TemporalOperator {
  truncated,            // R = Φ C(k_τ): the first τ rows dropped, no wrap-around
  circulant,            // R = C(k_τ)
  symmetric_circulant,  // R = C(k_τ) C(k_τ)ᵀ
};

/// Directed circulant Laplacian C(k_τ) of the kernel k_τ = (τ, −1 × τ, 0, ...)
/// over a horizon of T time points, together with the sparse penalty
/// operator R and its Gram matrix RᵀR.
class TemporalKernelLaplacian {
 public:
  /// Throws ParameterError unless 1 <= kernel_size < horizon.
  TemporalKernelLaplacian(std::size_t horizon, std::size_t kernel_size,
                          TemporalOperator variant = TemporalOperator::truncated);

  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t kernel_size() const noexcept { return kernel_size_; }
  TemporalOperator variant() const noexcept { return variant_; }

  /// Dense C(k_τ). Intended for small horizons.
  Matrix circulant() const;
  /// Φ = [0_{(T−τ)×τ} | I_{T−τ}].
  SparseMatrix truncation() const;
  /// R (banded, sparse).
  const SparseMatrix& penalty_operator() const noexcept { return operator_; }
  /// RᵀR (banded, symmetric positive semidefinite).
  const SparseMatrix& gram() const noexcept { return gram_; }

 private:
  std::size_t horizon_;
  std::size_t kernel_size_;
  TemporalOperator variant_;
  SparseMatrix operator_;
  SparseMatrix gram_;
};

/// ‖R Z‖²_F for Z of shape T x N.
double gtcr_penalty(const Matrix& z, const TemporalKernelLaplacian& k);

}  // namespace letc
