#include "letc/selftest.hpp"

#include "letc/letc.hpp"
#include "letc/oracles.hpp"

#include <algorithm>
#include <random>

namespace letc::cli {
namespace {

Tensor3 random_tensor(std::size_t n1, std::size_t n2, std::size_t n3, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Tensor3 t(n1, n2, n3);
  for (std::size_t q = 0; q < t.size(); ++q) t.data()[q] = g(rng);
  return t;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Eigen::Index q = 0; q < m.size(); ++q) m(q) = g(rng);
  return m;
}

void corrupt(Tensor3& t) { t.data()[0] += 1e-3 * (1.0 + t.frobenius_norm()); }
void corrupt(Matrix& m) { m(0) += 1e-3 * (1.0 + m.norm()); }

double rel(const Matrix& a, const Matrix& b) {
  const double nb = b.norm();
  return nb > 0.0 ? (a - b).norm() / nb : a.norm();
}

LinearTransform day_transform(std::size_t days) {
  return tgft_transform(build_temporal_adjacency(days, std::min<std::size_t>(7, days), 1.0, 1.0));
}

// Per-slice rank-r tensor in the transformed domain.
Tensor3 low_rank_tensor(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t r,
                        const LinearTransform& t, std::mt19937_64& rng) {
  Tensor3 spectral(n1, n2, n3);
  for (std::size_t k = 0; k < n3; ++k) {
    spectral.slice(k) = random_matrix(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(r), rng) *
                        random_matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n2), rng);
  }
  return mode3_inverse_transform(spectral, t);
}

double check_transform(bool fault) {
  std::mt19937_64 rng(11);
  const LinearTransform t = day_transform(14);
  const Tensor3 x = random_tensor(6, 5, 14, rng);
  Tensor3 back = mode3_inverse_transform(mode3_transform(x, t), t);
  if (fault) corrupt(back);
  return relative_error(back, x);
}

double check_tnn(bool fault) {
  std::mt19937_64 rng(12);
  const LinearTransform t = day_transform(5);
  const Tensor3 x = random_tensor(6, 4, 5, rng);
  double v = t_tnn(x, t);
  const double ref = oracle::block_diagonal_nuclear_norm(x, t);
  if (fault) v *= 1.001;
  return std::abs(v - ref) / ref;
}

double check_svt(bool fault) {
  std::mt19937_64 rng(13);
  const LinearTransform t = day_transform(5);
  const Tensor3 m = random_tensor(7, 6, 5, rng);
  Tensor3 v = t_svt(m, t, 0.5);
  if (fault) corrupt(v);
  return relative_error(v, oracle::per_slice_svt(m, t, 0.5));
}

double check_rsvt(bool fault) {
  std::mt19937_64 rng(14);
  const LinearTransform t = day_transform(5);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor3 m = low_rank_tensor(8, 12, 5, 4, t, rng);
    const SketchParams sketch{4, 2, 6};
    Tensor3 v = randomized_t_svt(m, t, 0.1, sketch, rng);
    if (fault) corrupt(v);
    worst = std::max(worst, relative_error(v, t_svt(m, t, 0.1)));
  }
  return worst;
}

double check_cg(bool fault) {
  std::mt19937_64 rng(15);
  const std::size_t I = 6, J = 8, K = 4;
  std::vector<DistanceEdge> edges;
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (std::size_t a = 0; a < J; ++a)
    for (std::size_t b = 0; b < J; ++b)
      if (a != b && (a + 2 * b) % 3 == 0) edges.push_back({a, b, u(rng)});
  const SpatialGraph g = gaussian_adjacency(std::span<const DistanceEdge>(edges), J);
  const SparseMatrix lap = spatial_laplacian(g, DiffusionKernel::one_step());
  const TemporalKernelLaplacian tk(I * K, 1);
  const ZSystem sys(lap, tk.gram(), 0.1, 0.1);
  const Tensor3 x = random_tensor(I, J, K, rng);
  const Tensor3 y = random_tensor(I, J, K, rng);
  const double mu = 1.0;
  Matrix z = z_update_cg(Matrix::Zero(I * K, J), x, y, mu, sys, 50);
  if (fault) corrupt(z);
  const Matrix rhs = mu * matricize(x) + matricize(y);
  const Matrix ref = oracle::kronecker_z_solve(rhs, Matrix(lap), Matrix(tk.penalty_operator()), 0.1, 0.1, mu);
  return rel(z, ref);
}

double check_smooth(bool fault) {
  std::mt19937_64 rng(16);
  const std::size_t n = 10;
  std::bernoulli_distribution coin(0.35);
  std::uniform_real_distribution<double> w(0.2, 1.0);
  Matrix a = Matrix::Zero(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng)) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w(rng);
        trips.emplace_back(static_cast<int>(i), static_cast<int>(j), a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
  SparseMatrix sa(n, n);
  sa.setFromTriplets(trips.begin(), trips.end());
  const SpatialGraph g(sa);
  const Matrix x = random_matrix(n, 4, rng);
  Matrix v = graph_smooth_closed_form(x, g);
  if (fault) corrupt(v);
  const Matrix lap = Matrix::Identity(n, n) - oracle::random_walk_transition(a);
  return (v - oracle::dense_smoother(x, lap)).cwiseAbs().maxCoeff();
}

double check_adjacency(bool fault) {
  Matrix a = build_temporal_adjacency(6, 3, 1.0, 1.0).adjacency;
  if (fault) corrupt(a);
  return (a - oracle::six_day_three_period_adjacency()).cwiseAbs().maxCoeff();
}

double check_circulant(bool fault) {
  const TemporalKernelLaplacian k(3, 1);
  Matrix c = k.circulant();
  if (fault) corrupt(c);
  Matrix expected(3, 3);
  expected << 1, 0, -1, -1, 1, 0, 0, -1, 1;
  Matrix diffs(2, 3);
  diffs << -1, 1, 0, 0, -1, 1;
  return std::max((c - expected).cwiseAbs().maxCoeff(),
                  (Matrix(k.penalty_operator()) - diffs).cwiseAbs().maxCoeff());
}

double check_remark(bool fault) {
  const std::size_t T = 9;
  Matrix toeplitz = TemporalKernelLaplacian(T, 1, TemporalOperator::circulant).penalty_operator();
  if (fault) corrupt(toeplitz);
  const Matrix qv = TemporalKernelLaplacian(T, 1, TemporalOperator::truncated).penalty_operator();
  const Matrix sym = TemporalKernelLaplacian(T, 2, TemporalOperator::symmetric_circulant).penalty_operator();
  return std::max({(toeplitz - oracle::toeplitz_first_order(T)).cwiseAbs().maxCoeff(),
                   (qv - oracle::quadratic_variation(T)).cwiseAbs().maxCoeff(),
                   (sym - oracle::symmetric_circulant(T, 2)).cwiseAbs().maxCoeff()});
}

}  // namespace

const std::vector<SelftestCheck>& selftest_checks() {
  static const std::vector<SelftestCheck> checks = {
      {"transform", "day-graph transform round trip, relative error", 1e-12, check_transform},
      {"tnn", "t-TNN vs block-diagonal nuclear norm, relative error", 1e-10, check_tnn},
      {"svt", "exact t-SVT vs thresholding through eigenpairs of slice Gram matrices, relative error", 1e-10, check_svt},
      {"rsvt", "randomized t-SVT (k=4, p=2, s=6) vs exact on rank-4 slices, relative error", 1e-6, check_rsvt},
      {"cg", "50 Krylov steps vs dense Kronecker solve, relative error", 1e-8, check_cg},
      {"smooth", "closed-form graph smoother vs dense LU, max abs error", 1e-10, check_smooth},
      {"adjacency", "6-day, 3-day-period adjacency vs typed-in matrix, max abs error", 0.0, check_adjacency},
      {"circulant", "C(k_1) and truncated operator for T=3, max abs error", 0.0, check_circulant},
      {"remark", "Toeplitz, symmetric circulant and quadratic-variation special cases, max abs error", 0.0,
       check_remark},
  };
  return checks;
}

}  // namespace letc::cli
