#pragma once

#include "letc/spatial.hpp"
#include "letc/temporal.hpp"
#include "letc/tensor.hpp"
#include "letc/transform.hpp"
#include "letc/tsvd.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace letc {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Partially observed (I*K) x J speed matrix.
struct ObservationSet {
  Matrix values;  // T; entries where `observed` is false are never read
  Mask observed;  // P
  Mask held_out;  // Ω_m, disjoint from `observed`; may be empty (all false)

  /// Throws ShapeError / ParameterError when the invariants do not hold.
  void validate() const;
  std::size_t observed_count() const { return static_cast<std::size_t>(observed.count()); }
  std::size_t held_out_count() const { return static_cast<std::size_t>(held_out.count()); }
};

enum class InitFill { zero, column_mean };

/// Krylov iteration for the Z subproblem. Both search the same Krylov space
/// at one operator product per step. Conjugate residual minimizes ‖r‖₂, so
/// its residual norms never increase; plain CG minimizes the energy norm of
/// the error and its residual norms may oscillate.
enum class KrylovMethod { conjugate_residual, conjugate_gradient };

/// Solver hyper-parameters. Defaults follow the reference settings:
/// ε = 1e-3, μ₀ = 1e-3, μ ← min(1.5 μ, 1e4), λ1 = 0.01, λ2 = 0.1.
struct SolverConfig {
  std::size_t intervals_per_day = 0;  // I; required

  double lambda_spatial = 0.01;   // λ1
  double lambda_temporal = 0.1;   // λ2
  std::size_t kernel_size = 1;    // τ
  TemporalOperator temporal_operator = TemporalOperator::truncated;
  DiffusionKernel diffusion = DiffusionKernel::one_step();

  // Day graph behind the mode-3 transform.
  std::size_t period = 7;
  double day_weight = 1.0;
  double period_weight = 1.0;
  std::optional<double> decay;
  std::optional<WeekendPattern> weekend;

  double mu_init = 1e-3;
  double mu_growth = 1.5;
  double mu_max = 1e4;
  double tolerance = 1e-3;  // ε on ‖Zʲ⁺¹ − Zʲ‖_F / ‖Zʲ‖_F
  std::size_t max_iters = 200;
  std::size_t cg_iters = 3;
  KrylovMethod krylov = KrylovMethod::conjugate_residual;

  std::size_t rank_init = 10;
  std::size_t rank_step = 10;
  std::optional<std::size_t> rank_cap;  // default min(I, J) − oversample − 1
  std::size_t power_iters = 1;
  std::size_t oversample = 10;
  bool exact_svt = false;

  InitFill init = InitFill::column_mean;  // unobserved entries of Z⁰; a column with no data takes the global mean
  bool track_objective = true;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0 = default_thread_count()

  /// Throws ParameterError on out-of-range values.
  void validate() const;
};

/// Operators shared by every iteration of one solve.
struct LetcOperators {
  LinearTransform transform;         // K x K, along days
  SparseMatrix spatial;              // L̃, J x J
  TemporalKernelLaplacian temporal;  // horizon I*K
};

LetcOperators build_operators(std::size_t intervals_per_day, std::size_t days,
                              const SpatialGraph& graph, const SolverConfig& config);

/// Normal-equation operator of the Z subproblem,
///   V(Q) = λ1 Q L̃ᵀL̃ + λ2 RᵀR Q + μ Q,
/// evaluated with matrix–matrix products (the Kronecker form is never built).
class ZSystem {
 public:
  ZSystem(const LetcOperators& ops, double lambda_spatial, double lambda_temporal);
  ZSystem(const SparseMatrix& spatial_laplacian, const SparseMatrix& temporal_gram,
          double lambda_spatial, double lambda_temporal);

  Matrix apply(const Matrix& q, double mu) const;

  const SparseMatrix& spatial_gram() const noexcept { return spatial_gram_; }
  const SparseMatrix& temporal_gram() const noexcept { return temporal_gram_; }
  double lambda_spatial() const noexcept { return lambda_spatial_; }
  double lambda_temporal() const noexcept { return lambda_temporal_; }

 private:
  SparseMatrix spatial_gram_;
  std::optional<Matrix> spatial_gram_dense_;  // used when L̃ᵀL̃ is mostly filled
  SparseMatrix temporal_gram_;
  double lambda_spatial_;
  double lambda_temporal_;
};

struct SolverState {
  Tensor3 x;  // I x J x K
  Matrix z;   // (I*K) x J
  Tensor3 y;  // dual, I x J x K
  double mu = 0.0;          // value for the next iteration
  std::size_t rank = 0;     // sketch rank for the next iteration
  std::size_t iteration = 0;
  double change = 0.0;      // last relative change e
  std::vector<double> objective_trace;
};

struct CgReport {
  std::size_t iterations = 0;
  std::vector<double> residual_norms;  // ‖r_i‖₂, starting with r₀
};

/// X ← D_{1/μ}(T(Z) − Y/μ), randomized unless `config.exact_svt`.
/// If `tnn` is given it receives ‖X‖_{t*}.
Tensor3 x_update(const SolverState& state, const SolverConfig& config,
                 const LinearTransform& transform, std::mt19937_64& rng, double* tnn = nullptr);

/// Runs `iters` Krylov steps on V(Z) = μ T⁻¹(X + Y/μ), warm started from
/// `z0`. Throws NumericError on a non-finite residual.
Matrix z_update_cg(const Matrix& z0, const Tensor3& x, const Tensor3& y, double mu,
                   const ZSystem& system, std::size_t iters, CgReport* report = nullptr,
                   KrylovMethod method = KrylovMethod::conjugate_residual);
Matrix z_update_cg(const SolverState& state, const SolverConfig& config, const ZSystem& system,
                   CgReport* report = nullptr);

/// Y + μ (X − T(Z)), using state.x, state.z, state.y and `mu`.
Tensor3 dual_update(const SolverState& state, double mu);

/// P ⊙ Z ← P ⊙ T; unobserved entries of z are left as they are.
Matrix transmit_observations(Matrix z, const ObservationSet& obs);

/// F_μ(X, Z, Y) = ‖X‖_{t*} + λ1/2 ‖L̃Zᵀ‖² + λ2/2 ‖RZ‖² + ⟨Y, X − T(Z)⟩ + μ/2 ‖X − T(Z)‖².
/// Pass `tnn` to skip the SVDs when ‖X‖_{t*} is already known.
double augmented_lagrangian(const Tensor3& x, const Matrix& z, const Tensor3& y, double mu,
                            const LetcOperators& ops, const SolverConfig& config,
                            std::optional<double> tnn = std::nullopt);

struct IterationRecord {
  std::size_t iteration = 0;
  double change = 0.0;
  double mu = 0.0;  // value used during this iteration
  std::size_t rank = 0;
  double objective = 0.0;  // F_μ(Xʲ⁺¹, Zʲ⁺¹, Yʲ⁺¹); NaN when tracking is off
  std::size_t cg_iterations = 0;
  double cg_residual = 0.0;
  double x_seconds = 0.0;
  double z_seconds = 0.0;
};

struct Diagnostics {
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t best_iteration = 0;
  std::vector<IterationRecord> trace;
  double x_seconds = 0.0;
  double z_seconds = 0.0;
  double total_seconds = 0.0;
};

struct SolveResult {
  Matrix z_hat;        // final iterate, or the smallest-change iterate if not converged
  SolverState state;   // state after the last iteration
  Diagnostics diagnostics;
};

/// Full ADMM loop. Never throws for non-convergence; check diagnostics.converged.
SolveResult solve(const ObservationSet& obs, const LetcOperators& ops, const SolverConfig& config);
SolveResult solve(const ObservationSet& obs, const SpatialGraph& graph, const SolverConfig& config);

/// Sketch rank cap for an I x J problem under `config`.
std::size_t effective_rank_cap(std::size_t rows, std::size_t cols, const SolverConfig& config);

struct Metrics {
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> wmape;  // absent when Σ|x| over Ω_m is zero
  std::size_t count = 0;
};

/// Errors over the entries flagged in `held_out`. Throws ParameterError when
/// the set is empty or the ground truth is not finite on it.
Metrics evaluate(const Matrix& estimate, const Matrix& truth, const Mask& held_out);

}  // namespace letc
