#include "letc/spatial.hpp"

#include "letc/error.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <set>
#include <string>

namespace letc {
namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix sparse_identity(std::size_t n) {
  SparseMatrix eye(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  eye.setIdentity();
  return eye;
}

// Row-normalizes `base`; rows with zero sum become a unit self-transition.
SparseMatrix row_normalize(const SparseMatrix& base, std::vector<std::size_t>* isolated) {
  const Vector degree = base * Vector::Ones(base.cols());
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(base.nonZeros()) + static_cast<std::size_t>(base.rows()));
  for (Eigen::Index outer = 0; outer < base.outerSize(); ++outer) {
    for (SparseMatrix::InnerIterator it(base, outer); it; ++it) {
      if (degree(it.row()) > 0.0) entries.emplace_back(it.row(), it.col(), it.value() / degree(it.row()));
    }
  }
  for (Eigen::Index r = 0; r < base.rows(); ++r) {
    if (degree(r) <= 0.0) {
      entries.emplace_back(r, r, 1.0);
      if (isolated) isolated->push_back(static_cast<std::size_t>(r));
    }
  }
  SparseMatrix out(base.rows(), base.cols());
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

// c·I − h for an operator h whose rows sum to c: the diagonal is rebuilt as the
// ascending-column sum of the off-diagonal entries of h, so every row of the
// result sums to exactly zero when accumulated in that order.
SparseMatrix balanced_laplacian(const SparseMatrix& h) {
  const Eigen::SparseMatrix<double, Eigen::RowMajor> rows(h);
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(rows.nonZeros()) + static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index r = 0; r < rows.outerSize(); ++r) {
    double degree = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, r); it; ++it) {
      if (it.col() == r || it.value() == 0.0) continue;
      entries.emplace_back(r, it.col(), -it.value());
      degree += it.value();
    }
    if (degree != 0.0) entries.emplace_back(r, r, degree);
  }
  SparseMatrix lap(h.rows(), h.cols());
  lap.setFromTriplets(entries.begin(), entries.end());
  return lap;
}

double gaussian_weight(double distance, double sigma, double delta) {
  const double r = distance / (delta * sigma);
  return std::exp(-r * r);
}

void require_kernel_scale(double sigma, double delta) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ParameterError("gaussian_adjacency: sigma must be > 0, got " + std::to_string(sigma));
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ParameterError("gaussian_adjacency: delta must be > 0, got " + std::to_string(delta));
}

}  // namespace

SpatialGraph::SpatialGraph(SparseMatrix adjacency, DegreeMode mode) : mode_(mode) {
  if (adjacency.rows() != adjacency.cols())
    throw ShapeError("SpatialGraph: adjacency must be square");
  std::vector<Triplet> entries;
  for (Eigen::Index outer = 0; outer < adjacency.outerSize(); ++outer) {
    for (SparseMatrix::InnerIterator it(adjacency, outer); it; ++it) {
      if (!std::isfinite(it.value()) || it.value() < 0.0) {
        throw ParameterError("SpatialGraph: weight (" + std::to_string(it.row()) + ", " +
                             std::to_string(it.col()) + ") must be finite and nonnegative");
      }
      if (it.row() != it.col() && it.value() > 0.0) entries.emplace_back(it.row(), it.col(), it.value());
    }
  }
  adjacency_.resize(adjacency.rows(), adjacency.cols());
  adjacency_.setFromTriplets(entries.begin(), entries.end());
  transition_ = row_normalize(mode == DegreeMode::out ? adjacency_ : SparseMatrix(adjacency_.transpose()),
                              &isolated_);
}

SparseMatrix SpatialGraph::transition(DegreeMode mode) const {
  if (mode == mode_) return transition_;
  return row_normalize(mode == DegreeMode::out ? adjacency_ : SparseMatrix(adjacency_.transpose()),
                       nullptr);
}

SparseMatrix SpatialGraph::laplacian() const { return balanced_laplacian(transition_); }

double distance_std(const Matrix& dist) {
  if (dist.size() == 0) return 0.0;
  const double mean = dist.mean();
  return std::sqrt((dist.array() - mean).square().mean());
}

SpatialGraph gaussian_adjacency(const Matrix& dist,
                                std::span<const std::pair<std::size_t, std::size_t>> edges,
                                std::optional<double> sigma, double delta, DegreeMode mode) {
  if (dist.rows() != dist.cols()) throw ShapeError("gaussian_adjacency: distance matrix must be square");
  if (!dist.allFinite() || (dist.size() > 0 && dist.minCoeff() < 0.0))
    throw ParameterError("gaussian_adjacency: distances must be finite and nonnegative");
  const double s = sigma ? *sigma : distance_std(dist);
  require_kernel_scale(s, delta);

  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<Triplet> entries;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) throw ParameterError("gaussian_adjacency: edge endpoint out of range");
    if (i == j) continue;
    if (!seen.emplace(i, j).second)
      throw ParameterError("gaussian_adjacency: duplicate edge " + std::to_string(i) + "->" + std::to_string(j));
    entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j),
                         gaussian_weight(dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                         s, delta));
  }
  SparseMatrix a(dist.rows(), dist.cols());
  a.setFromTriplets(entries.begin(), entries.end());
  return SpatialGraph(std::move(a), mode);
}

SpatialGraph gaussian_adjacency(std::span<const DistanceEdge> edges, std::size_t nodes,
                                std::optional<double> sigma, double delta, DegreeMode mode) {
  double s = 0.0;
  if (sigma) {
    s = *sigma;
  } else if (!edges.empty()) {
    Vector d(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t e = 0; e < edges.size(); ++e) d(static_cast<Eigen::Index>(e)) = edges[e].distance;
    const double mean = d.mean();
    s = std::sqrt((d.array() - mean).square().mean());
    if (!(s > 0.0)) s = mean > 0.0 ? mean : 1.0;
  } else {
    s = 1.0;
  }
  require_kernel_scale(s, delta);

  std::vector<Triplet> entries;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const DistanceEdge& e : edges) {
    if (e.src >= nodes || e.dst >= nodes) throw ParameterError("gaussian_adjacency: edge endpoint out of range");
    if (!std::isfinite(e.distance) || e.distance < 0.0)
      throw ParameterError("gaussian_adjacency: edge distance must be finite and nonnegative");
    if (e.src == e.dst) continue;
    if (!seen.emplace(e.src, e.dst).second) {
      throw ParameterError("gaussian_adjacency: duplicate edge " + std::to_string(e.src) + "->" +
                           std::to_string(e.dst));
    }
    entries.emplace_back(static_cast<Eigen::Index>(e.src), static_cast<Eigen::Index>(e.dst),
                         gaussian_weight(e.distance, s, delta));
  }
  const auto n = static_cast<Eigen::Index>(nodes);
  SparseMatrix a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  return SpatialGraph(std::move(a), mode);
}

std::size_t series_truncation_order(const DiffusionKernel& k) {
  constexpr double kTail = 1e-8;
  constexpr std::size_t kCap = 64;
  switch (k.kind) {
    case DiffusionKernel::Kind::ppr: {
      if (!(k.alpha > 0.0 && k.alpha < 1.0))
        throw ParameterError("ppr kernel: alpha must lie in (0, 1)");
      if (k.truncation_order > 0) return k.truncation_order;
      // Tail beyond n is (1 − α)^{n+1}.
      std::size_t n = 0;
      double tail = 1.0 - k.alpha;
      while (tail > kTail && n < kCap) {
        tail *= 1.0 - k.alpha;
        ++n;
      }
      return n;
    }
    case DiffusionKernel::Kind::heat: {
      if (!(k.time > 0.0) || !std::isfinite(k.time))
        throw ParameterError("heat kernel: diffusion time must be > 0");
      if (k.truncation_order > 0) return k.truncation_order;
      // Poisson(t) tail beyond n, summed from the upper side to avoid cancellation.
      std::vector<double> pmf(kCap + 200);
      pmf[0] = std::exp(-k.time);
      for (std::size_t i = 1; i < pmf.size(); ++i) pmf[i] = pmf[i - 1] * k.time / static_cast<double>(i);
      for (std::size_t n = 0; n < kCap; ++n) {
        double tail = 0.0;
        for (std::size_t i = pmf.size(); i-- > n + 1;) tail += pmf[i];
        if (tail <= kTail) return n;
      }
      return kCap;
    }
    default:
      return 0;
  }
}

std::vector<double> series_coefficients(const DiffusionKernel& k) {
  const std::size_t order = series_truncation_order(k);
  std::vector<double> c(order + 1);
  if (k.kind == DiffusionKernel::Kind::ppr) {
    double w = k.alpha;
    for (std::size_t i = 0; i <= order; ++i, w *= 1.0 - k.alpha) c[i] = w;
  } else if (k.kind == DiffusionKernel::Kind::heat) {
    double w = std::exp(-k.time);
    for (std::size_t i = 0; i <= order; ++i) {
      c[i] = w;
      w *= k.time / static_cast<double>(i + 1);
    }
  } else {
    throw ParameterError("series_coefficients: kernel has no series form");
  }
  return c;
}

SparseMatrix diffusion_operator(const SpatialGraph& g, const DiffusionKernel& k) {
  const SparseMatrix& a = g.transition();
  switch (k.kind) {
    case DiffusionKernel::Kind::one_step:
      return a;
    case DiffusionKernel::Kind::high_order: {
      if (k.steps < 1) throw ParameterError("high-order kernel: steps must be >= 1");
      SparseMatrix h = a;
      for (std::size_t s = 1; s < k.steps; ++s) h = SparseMatrix(h * a);
      return h;
    }
    case DiffusionKernel::Kind::ppr:
    case DiffusionKernel::Kind::heat: {
      const std::vector<double> c = series_coefficients(k);
      SparseMatrix power = sparse_identity(g.nodes());
      SparseMatrix h = c[0] * power;
      for (std::size_t i = 1; i < c.size(); ++i) {
        power = SparseMatrix(power * a);
        h += c[i] * power;
      }
      return h;
    }
    case DiffusionKernel::Kind::bidirectional:
      return g.transition(DegreeMode::out) + g.transition(DegreeMode::in);
  }
  throw ParameterError("diffusion_operator: unknown kernel");
}

SparseMatrix spatial_laplacian(const SpatialGraph& g, const DiffusionKernel& k) {
  const SparseMatrix h = diffusion_operator(g, k);
  if (k.kind == DiffusionKernel::Kind::ppr || k.kind == DiffusionKernel::Kind::heat) {
    // Truncated series: rows sum to 1 − tail, so keep I − h literally.
    SparseMatrix lap = sparse_identity(g.nodes()) - h;
    lap.prune(0.0);
    return lap;
  }
  // Row-stochastic h (rows of the bidirectional sum add to 2).
  return balanced_laplacian(h);
}

double dgr_penalty(const Matrix& z, const SpatialGraph& g, const DiffusionKernel& k) {
  if (static_cast<std::size_t>(z.cols()) != g.nodes()) {
    throw ShapeError("dgr_penalty: Z has " + std::to_string(z.cols()) + " columns, graph has " +
                     std::to_string(g.nodes()) + " nodes");
  }
  const SparseMatrix lap = spatial_laplacian(g, k);
  const Matrix zl = z * SparseMatrix(lap.transpose());  // (L̃ Zᵀ)ᵀ
  return zl.squaredNorm();
}

Matrix graph_smooth_closed_form(const Matrix& x, const SpatialGraph& g, double step) {
  if (static_cast<std::size_t>(x.rows()) != g.nodes()) {
    throw ShapeError("graph_smooth_closed_form: X has " + std::to_string(x.rows()) +
                     " rows, graph has " + std::to_string(g.nodes()) + " nodes");
  }
  if (!(step >= 0.0)) throw ParameterError("graph_smooth_closed_form: step must be >= 0");
  SparseMatrix system = sparse_identity(g.nodes()) + step * g.laplacian();
  system.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) throw NumericError("graph_smooth_closed_form: singular system");
  Matrix out = lu.solve(x);
  if (lu.info() != Eigen::Success || !out.allFinite())
    throw NumericError("graph_smooth_closed_form: solve failed");
  return out;
}

}  // namespace letc
