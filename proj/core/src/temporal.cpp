#include "letc/temporal.hpp"

#include "letc/error.hpp"
#include "letc/tsvd.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace letc {

Matrix graph_laplacian(const Matrix& w) {
  if (w.rows() != w.cols()) throw ShapeError("graph_laplacian: weight matrix must be square");
  if (!w.allFinite()) throw ParameterError("graph_laplacian: non-finite weight");
  if (w.size() > 0 && w.minCoeff() < 0.0)
    throw ParameterError("graph_laplacian: negative weight " + std::to_string(w.minCoeff()));
  // Diagonal = left-to-right sum of the off-diagonal weights, so each row of
  // the result sums to exactly zero in that order.
  Matrix lap = -w;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double degree = 0.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      if (j != i) degree += w(i, j);
    lap(i, i) = degree;
  }
  return lap;
}

TemporalPeriodicGraph build_temporal_adjacency(const TemporalAdjacencyParams& p) {
  const std::size_t days = p.days;
  const std::size_t period = p.period;
  if (days < 1) throw ParameterError("build_temporal_adjacency: days must be >= 1");
  if (period < 1 || period > days) {
    throw ParameterError("build_temporal_adjacency: period " + std::to_string(period) +
                         " must lie in [1, days = " + std::to_string(days) + "]");
  }
  if (!(p.day_weight >= 0.0) || !(p.period_weight >= 0.0))
    throw ParameterError("build_temporal_adjacency: weights must be >= 0");
  if (p.decay && !(*p.decay > 0.0 && *p.decay < 1.0))
    throw ParameterError("build_temporal_adjacency: decay must lie in (0, 1)");

  // Subdiagonal (day-to-day) weight pattern, one entry per position within a period.
  std::vector<double> h(period, p.day_weight);
  if (p.weekend) {
    const std::size_t tw = p.weekend->days;
    if (tw < 1 || 2 * tw > period + 1) {
      throw ParameterError("build_temporal_adjacency: weekend day count " + std::to_string(tw) +
                           " needs 1 <= T_w and 2 T_w - 1 <= period");
    }
    if (!(p.weekend->weight >= 0.0))
      throw ParameterError("build_temporal_adjacency: weekend weight must be >= 0");
    for (std::size_t i = period - 2 * tw + 1; i < period; ++i) h[i] = p.weekend->weight;
  }

  const auto d = static_cast<Eigen::Index>(days);
  TemporalPeriodicGraph g;
  g.params = p;
  g.adjacency = Matrix::Identity(d, d);
  for (Eigen::Index c = 0; c + 1 < d; ++c) {
    const double w = h[static_cast<std::size_t>(c) % period];
    g.adjacency(c + 1, c) += w;
    g.adjacency(c, c + 1) += w;
  }
  const std::size_t periods = (days - 1) / period;
  for (std::size_t n = 1; n <= periods; ++n) {
    const double w = p.decay ? *p.decay * std::pow(1.0 - *p.decay, static_cast<double>(n)) *
                                   p.period_weight
                             : p.period_weight;
    const auto offset = static_cast<Eigen::Index>(n * period);
    for (Eigen::Index r = offset; r < d; ++r) {
      g.adjacency(r, r - offset) += w;
      g.adjacency(r - offset, r) += w;
    }
  }

  g.laplacian = graph_laplacian(g.adjacency);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g.laplacian);
  if (eig.info() != Eigen::Success)
    throw NumericError("build_temporal_adjacency: eigendecomposition failed");
  g.eigenvalues = eig.eigenvalues();
  g.eigenvectors = eig.eigenvectors();
  Matrix unused(g.eigenvectors.rows(), 0);
  canonicalize_signs(g.eigenvectors, unused);
  return g;
}

TemporalPeriodicGraph build_temporal_adjacency(std::size_t days, std::size_t period,
                                               double day_weight, double period_weight,
                                               std::optional<double> decay,
                                               std::optional<WeekendPattern> weekend) {
  TemporalAdjacencyParams p;
  p.days = days;
  p.period = period;
  p.day_weight = day_weight;
  p.period_weight = period_weight;
  p.decay = decay;
  p.weekend = weekend;
  return build_temporal_adjacency(p);
}

LinearTransform tgft_transform(const TemporalPeriodicGraph& g) {
  return LinearTransform(g.eigenvectors.transpose(), 1.0);
}

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix sparse_circulant(std::size_t horizon, std::size_t tau) {
  const auto t = static_cast<Eigen::Index>(horizon);
  const auto w = static_cast<Eigen::Index>(tau);
  std::vector<Triplet> entries;
  entries.reserve(horizon * (tau + 1));
  for (Eigen::Index r = 0; r < t; ++r) {
    entries.emplace_back(r, r, static_cast<double>(tau));
    for (Eigen::Index lag = 1; lag <= w; ++lag) entries.emplace_back(r, (r - lag + t) % t, -1.0);
  }
  SparseMatrix c(t, t);
  c.setFromTriplets(entries.begin(), entries.end());
  return c;
}

}  // namespace

TemporalKernelLaplacian::TemporalKernelLaplacian(std::size_t horizon, std::size_t kernel_size,
                                                 TemporalOperator variant)
    : horizon_(horizon), kernel_size_(kernel_size), variant_(variant) {
  if (kernel_size < 1 || kernel_size >= horizon) {
    throw ParameterError("temporal_kernel_laplacian: kernel size " + std::to_string(kernel_size) +
                         " must satisfy 1 <= tau < T = " + std::to_string(horizon));
  }
  const SparseMatrix c = sparse_circulant(horizon, kernel_size);
  switch (variant) {
    case TemporalOperator::truncated:
      operator_ = truncation() * c;
      break;
    case TemporalOperator::circulant:
      operator_ = c;
      break;
    case TemporalOperator::symmetric_circulant:
      operator_ = c * SparseMatrix(c.transpose());
      break;
  }
  operator_.prune(0.0);
  gram_ = SparseMatrix(operator_.transpose()) * operator_;
  gram_.prune(0.0);
}

Matrix TemporalKernelLaplacian::circulant() const {
  return Matrix(sparse_circulant(horizon_, kernel_size_));
}

SparseMatrix TemporalKernelLaplacian::truncation() const {
  const auto rows = static_cast<Eigen::Index>(horizon_ - kernel_size_);
  const auto tau = static_cast<Eigen::Index>(kernel_size_);
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) entries.emplace_back(r, r + tau, 1.0);
  SparseMatrix phi(rows, static_cast<Eigen::Index>(horizon_));
  phi.setFromTriplets(entries.begin(), entries.end());
  return phi;
}

double gtcr_penalty(const Matrix& z, const TemporalKernelLaplacian& k) {
  if (static_cast<std::size_t>(z.rows()) != k.horizon()) {
    throw ShapeError("gtcr_penalty: Z has " + std::to_string(z.rows()) +
                     " rows, operator horizon is " + std::to_string(k.horizon()));
  }
  const Matrix rz = k.penalty_operator() * z;
  return rz.squaredNorm();
}

}  // namespace letc
