#include "letc/error.hpp"
#include "letc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace letc {
namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), id};
  return std::mt19937_64(seq);
}

// Sum of a few random plane waves, rescaled to [0, 1].
Vector smooth_field(const Matrix& xy, std::mt19937_64& rng) {
  std::normal_distribution<double> freq(0.0, 1.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Vector f = Vector::Zero(xy.rows());
  for (int w = 0; w < 4; ++w) {
    const double fx = freq(rng), fy = freq(rng), ph = phase(rng);
    for (Eigen::Index j = 0; j < xy.rows(); ++j)
      f(j) += std::cos(2.0 * std::numbers::pi * (fx * xy(j, 0) + fy * xy(j, 1)) + ph);
  }
  const double lo = f.minCoeff(), hi = f.maxCoeff();
  if (hi - lo > 0.0) f = (f.array() - lo) / (hi - lo);
  else f.setConstant(0.5);
  return f;
}

}  // namespace

SyntheticData generate_synthetic(std::size_t locations, std::size_t intervals_per_day,
                                 std::size_t days, std::size_t period, double noise_sd,
                                 std::uint64_t seed) {
  if (locations < 2) throw ParameterError("generate_synthetic: need at least 2 locations");
  if (intervals_per_day < 1 || days < 1 || period < 1)
    throw ParameterError("generate_synthetic: intervals, days and period must be >= 1");
  if (!(noise_sd >= 0.0)) throw ParameterError("generate_synthetic: noise_sd must be >= 0");

  const auto J = static_cast<Eigen::Index>(locations);
  auto geo = stream(seed, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix xy(J, 2);
  for (Eigen::Index j = 0; j < J; ++j) {
    xy(j, 0) = unit(geo);
    xy(j, 1) = unit(geo);
  }

  std::vector<double> pair_dist;
  pair_dist.reserve(locations * (locations - 1) / 2);
  for (Eigen::Index a = 0; a < J; ++a)
    for (Eigen::Index b = a + 1; b < J; ++b) pair_dist.push_back((xy.row(a) - xy.row(b)).norm());
  auto nth = pair_dist.begin() +
             static_cast<std::ptrdiff_t>(kSyntheticRadiusPercentile * static_cast<double>(pair_dist.size() - 1));
  std::nth_element(pair_dist.begin(), nth, pair_dist.end());
  const double radius = *nth;

  SyntheticData out;
  std::vector<DistanceEdge>& edges = out.dataset.edges;
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index a = 0; a < J; ++a) {
    for (Eigen::Index b = a + 1; b < J; ++b) {
      const double d = (xy.row(a) - xy.row(b)).norm();
      if (d > radius) continue;
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      if (coin(geo)) {
        edges.push_back({ua, ub, d});
        edges.push_back({ub, ua, d});
      } else if (coin(geo)) {
        edges.push_back({ua, ub, d});
      } else {
        edges.push_back({ub, ua, d});
      }
    }
  }

  const auto rows = static_cast<Eigen::Index>(intervals_per_day * days);
  Matrix basis(rows, static_cast<Eigen::Index>(kSyntheticBasisCount));
  for (std::size_t d = 0; d < days; ++d) {
    const double week = std::cos(2.0 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(period));
    for (std::size_t i = 0; i < intervals_per_day; ++i) {
      const double h = (static_cast<double>(i) + 0.5) / static_cast<double>(intervals_per_day);
      const auto r = static_cast<Eigen::Index>(d * intervals_per_day + i);
      basis(r, 0) = 1.0;
      basis(r, 1) = (1.0 + 0.3 * week) * std::exp(-std::pow((h - 0.33) / 0.08, 2));
      basis(r, 2) = (1.0 - 0.3 * week) * std::exp(-std::pow((h - 0.73) / 0.10, 2));
    }
  }

  auto load = stream(seed, 2);
  Matrix weights(static_cast<Eigen::Index>(kSyntheticBasisCount), J);
  weights.row(0) = (50.0 + 20.0 * smooth_field(xy, load).array()).transpose();
  weights.row(1) = (-5.0 - 20.0 * smooth_field(xy, load).array()).transpose();
  weights.row(2) = (-5.0 - 20.0 * smooth_field(xy, load).array()).transpose();

  const SpatialGraph graph = gaussian_adjacency(std::span<const DistanceEdge>(edges), locations);
  const Matrix raw = basis * weights;
  out.truth = raw * SparseMatrix(graph.transition().transpose());

  auto noise = stream(seed, 3);
  std::normal_distribution<double> gauss(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
  out.dataset.values = out.truth;
  if (noise_sd > 0.0)
    for (Eigen::Index k = 0; k < out.dataset.values.size(); ++k) out.dataset.values(k) += gauss(noise);

  out.dataset.intervals_per_day = intervals_per_day;
  out.dataset.days = days;
  out.dataset.location_ids.reserve(locations);
  for (std::size_t j = 0; j < locations; ++j) out.dataset.location_ids.push_back("s" + std::to_string(j));
  out.coordinates = std::move(xy);
  out.dataset.validate();
  return out;
}

Matrix neighbor_mean_baseline(const ObservationSet& obs, const SpatialGraph& graph) {
  obs.validate();
  const SparseMatrix& a = graph.adjacency();
  if (a.rows() != obs.values.cols()) throw ShapeError("neighbor_mean_baseline: graph size differs from J");
  const Eigen::Index J = a.rows();
  std::vector<std::vector<Eigen::Index>> nbr(static_cast<std::size_t>(J));
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      if (it.row() == it.col() || it.value() == 0.0) continue;
      nbr[static_cast<std::size_t>(it.row())].push_back(it.col());
      nbr[static_cast<std::size_t>(it.col())].push_back(it.row());
    }
  }
  for (auto& v : nbr) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  double gsum = 0.0;
  std::size_t gcount = 0;
  for (Eigen::Index k = 0; k < obs.values.size(); ++k)
    if (obs.observed(k)) gsum += obs.values(k), ++gcount;
  const double global = gcount ? gsum / static_cast<double>(gcount) : 0.0;

  Matrix out = obs.values;
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    double rsum = 0.0;
    std::size_t rcount = 0;
    for (Eigen::Index j = 0; j < J; ++j)
      if (obs.observed(t, j)) rsum += obs.values(t, j), ++rcount;
    const double row_mean = rcount ? rsum / static_cast<double>(rcount) : global;
    for (Eigen::Index j = 0; j < J; ++j) {
      if (obs.observed(t, j)) continue;
      double s = 0.0;
      std::size_t n = 0;
      for (Eigen::Index l : nbr[static_cast<std::size_t>(j)])
        if (obs.observed(t, l)) s += obs.values(t, l), ++n;
      out(t, j) = n ? s / static_cast<double>(n) : row_mean;
    }
  }
  return out;
}

}  // namespace letc
