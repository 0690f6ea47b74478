#pragma once

#include "letc/tensor.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace letc {

/// Which degree normalizes the random walk on a directed sensor graph.
///
/// `out`: row j of Ã averages the successors of j (Ã = D_out⁻¹ A).
/// `in`:  row j of Ã averages the predecessors of j (Ã = D_in⁻¹ Aᵀ).
/// Both give a row-stochastic Ã.
enum class DegreeMode { out, in };

struct DistanceEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double distance = 0.0;
};

/// Directed weighted sensor graph.
///
/// Self-loops are dropped on construction. A node with zero degree (in the
/// active mode) gets a unit self-transition, so its Laplacian row is zero and
/// the spatial penalty leaves it alone.
class SpatialGraph {
 public:
  SpatialGraph() = default;
  explicit SpatialGraph(SparseMatrix adjacency, DegreeMode mode = DegreeMode::out);

  std::size_t nodes() const noexcept { return static_cast<std::size_t>(adjacency_.rows()); }
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  DegreeMode degree_mode() const noexcept { return mode_; }

  /// Row-stochastic Ã for the graph's own degree mode.
  const SparseMatrix& transition() const noexcept { return transition_; }
  /// Row-stochastic Ã for an explicit mode.
  SparseMatrix transition(DegreeMode mode) const;
  /// L̃ = I − Ã. The diagonal is stored as the sum of the off-diagonal
  /// transitions, so every row sums to exactly zero.
  SparseMatrix laplacian() const;

  /// Nodes with zero degree in the graph's degree mode.
  const std::vector<std::size_t>& isolated_nodes() const noexcept { return isolated_; }

 private:
  SparseMatrix adjacency_;
  DegreeMode mode_ = DegreeMode::out;
  SparseMatrix transition_;
  std::vector<std::size_t> isolated_;
};

/// Population standard deviation of all entries of a distance matrix.
double distance_std(const Matrix& dist);

/// a_ij = exp(−(dist(i,j) / (δσ))²) for every listed directed edge i→j.
/// `sigma` defaults to the standard deviation of `dist`.
SpatialGraph gaussian_adjacency(const Matrix& dist,
                                std::span<const std::pair<std::size_t, std::size_t>> edges,
                                std::optional<double> sigma = std::nullopt, double delta = 1.0,
                                DegreeMode mode = DegreeMode::out);

/// Same kernel over an edge list carrying its own distances. `sigma`
/// defaults to the standard deviation of the edge distances (the mean, then
/// 1, if that is zero).
SpatialGraph gaussian_adjacency(std::span<const DistanceEdge> edges, std::size_t nodes,
                                std::optional<double> sigma = std::nullopt, double delta = 1.0,
                                DegreeMode mode = DegreeMode::out);

/// Diffusion function h(Ã) used inside the spatial regularizer.
struct DiffusionKernel {
  enum class Kind { one_step, high_order, ppr, heat, bidirectional };

  Kind kind = Kind::one_step;
  std::size_t steps = 2;             // high_order: Ã^K
  double alpha = 0.15;               // ppr teleport probability, (0, 1)
  double time = 1.0;                 // heat diffusion time, > 0
  std::size_t truncation_order = 0;  // ppr/heat series length; 0 = automatic

  static DiffusionKernel one_step() { return {}; }
  static DiffusionKernel high_order(std::size_t steps) {
    DiffusionKernel k;
    k.kind = Kind::high_order;
    k.steps = steps;
    return k;
  }
  static DiffusionKernel ppr(double alpha, std::size_t order = 0) {
    DiffusionKernel k;
    k.kind = Kind::ppr;
    k.alpha = alpha;
    k.truncation_order = order;
    return k;
  }
  static DiffusionKernel heat(double time, std::size_t order = 0) {
    DiffusionKernel k;
    k.kind = Kind::heat;
    k.time = time;
    k.truncation_order = order;
    return k;
  }
  static DiffusionKernel bidirectional() {
    DiffusionKernel k;
    k.kind = Kind::bidirectional;
    return k;
  }
};

/// Resolved series length for ppr/heat: the explicit order, or the smallest
/// n whose coefficient tail beyond n is <= 1e-8, capped at 64.
std::size_t series_truncation_order(const DiffusionKernel& k);

/// Series coefficients c_0..c_n of h for ppr/heat kernels.
std::vector<double> series_coefficients(const DiffusionKernel& k);

/// Materializes h(Ã). For the bidirectional kernel this is Ã_f + Ã_b.
SparseMatrix diffusion_operator(const SpatialGraph& g, const DiffusionKernel& k);

/// The operator L̃ of the spatial penalty ‖L̃ Zᵀ‖²_F: I − h(Ã), or
/// (I − Ã_f) + (I − Ã_b) for the bidirectional kernel.
SparseMatrix spatial_laplacian(const SpatialGraph& g, const DiffusionKernel& k);

/// ‖L̃ Zᵀ‖²_F for Z of shape (time points) x J.
double dgr_penalty(const Matrix& z, const SpatialGraph& g, const DiffusionKernel& k);

/// Dirichlet-energy smoother: solves (I + step·L̃) X̄ = X for X of shape J x N,
/// with L̃ = I − Ã the one-step random-walk Laplacian.
Matrix graph_smooth_closed_form(const Matrix& x, const SpatialGraph& g, double step = 1.0);

}  // namespace letc
