#include "letc/oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

namespace letc {
namespace {

TEST(GraphLaplacian, TwoNodes) {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(graph_laplacian(w), expected);
}

TEST(GraphLaplacian, ZeroWeightsGiveZero) { EXPECT_EQ(graph_laplacian(Matrix::Zero(3, 3)), Matrix::Zero(3, 3)); }

TEST(GraphLaplacian, RandomSymmetricIsPositiveSemidefinite) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix w(5, 5);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) w(i, j) = w(j, i) = (i == j) ? 0.0 : u(rng);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(graph_laplacian(w));
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
}

TEST(GraphLaplacian, NegativeWeightThrows) {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = -1.0;
  EXPECT_THROW(graph_laplacian(w), ParameterError);
  EXPECT_THROW(graph_laplacian(Matrix::Zero(2, 3)), ShapeError);
}

TEST(TemporalAdjacency, SixDaysThreeDayPeriodMatchesTypedInMatrix) {
  const TemporalPeriodicGraph g = build_temporal_adjacency(6, 3, 1.0, 1.0);
  EXPECT_EQ(g.adjacency, oracle::six_day_three_period_adjacency());
  EXPECT_EQ(g.adjacency, oracle::periodic_pattern(6, 3));
}

TEST(TemporalAdjacency, PatternMatchesLoopConstructionForLongerHorizons) {
  for (std::size_t d : {7u, 14u, 28u})
    for (std::size_t t : {2u, 5u, 7u}) EXPECT_EQ(build_temporal_adjacency(d, t, 1, 1).adjacency, oracle::periodic_pattern(d, t));
}

TEST(TemporalAdjacency, SingleDay) {
  const TemporalPeriodicGraph g = build_temporal_adjacency(1, 1, 1.0, 1.0);
  EXPECT_EQ(g.adjacency, Matrix::Ones(1, 1));
  const LinearTransform t = tgft_transform(g);
  EXPECT_EQ(t.forward(), Matrix::Ones(1, 1));
}

TEST(TemporalAdjacency, NoCompletePeriodIsTridiagonal) {
  const Matrix a = build_temporal_adjacency(4, 4, 1.0, 1.0).adjacency;
  Matrix expected = Matrix::Identity(4, 4);
  for (Eigen::Index i = 0; i + 1 < 4; ++i) expected(i, i + 1) = expected(i + 1, i) = 1.0;
  EXPECT_EQ(a, expected);
}

TEST(TemporalAdjacency, PeriodLongerThanHorizonThrows) {
  EXPECT_THROW(build_temporal_adjacency(3, 4, 1.0, 1.0), ParameterError);
  EXPECT_THROW(build_temporal_adjacency(3, 0, 1.0, 1.0), ParameterError);
  EXPECT_THROW(build_temporal_adjacency(5, 2, -1.0, 1.0), ParameterError);
}

TEST(TemporalAdjacency, DecayWeightsCompletePeriods) {
  const double beta = 0.3;
  const Matrix a = build_temporal_adjacency(10, 3, 1.0, 2.0, beta).adjacency;
  // m = floor(9 / 3) = 3 periods, weight β(1−β)ⁿ ωT for n = 1..3.
  for (std::size_t n = 1; n <= 3; ++n) {
    const double w = beta * std::pow(1.0 - beta, static_cast<double>(n)) * 2.0;
    EXPECT_DOUBLE_EQ(a(0, static_cast<Eigen::Index>(3 * n)), w);
    EXPECT_DOUBLE_EQ(a(static_cast<Eigen::Index>(3 * n), 0), w);
  }
  EXPECT_DOUBLE_EQ(a(0, 1), 1.0);
}

TEST(TemporalAdjacency, WeekendPatternRepeatsAlongSubdiagonal) {
  const std::size_t T = 7, Tw = 2;
  const double w1 = 1.0, w2 = 0.25;
  const Matrix a = build_temporal_adjacency(14, T, w1, 1.0, std::nullopt, WeekendPattern{w2, Tw}).adjacency;
  // H = Diag(ω1 × (T − 2T_w + 1), ω2 × (2T_w − 1)), repeated.
  std::vector<double> h;
  for (std::size_t q = 0; q < T - 2 * Tw + 1; ++q) h.push_back(w1);
  for (std::size_t q = 0; q < 2 * Tw - 1; ++q) h.push_back(w2);
  for (Eigen::Index i = 0; i + 1 < 14; ++i) {
    EXPECT_DOUBLE_EQ(a(i + 1, i), h[static_cast<std::size_t>(i) % T]) << "row " << i + 1;
    EXPECT_DOUBLE_EQ(a(i, i + 1), a(i + 1, i));
  }
}

TEST(TemporalAdjacency, LaplacianInvariants) {
  const TemporalPeriodicGraph g = build_temporal_adjacency(14, 7, 1.0, 0.5, 0.4, WeekendPattern{0.7, 2});
  EXPECT_EQ(g.adjacency, g.adjacency.transpose());
  EXPECT_GE(g.adjacency.minCoeff(), 0.0);
  EXPECT_EQ(testing::ordered_row_sums(g.laplacian), Vector::Zero(14));
  EXPECT_LE((g.eigenvectors * g.eigenvectors.transpose() - Matrix::Identity(14, 14)).cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index i = 1; i < g.eigenvalues.size(); ++i) EXPECT_LE(g.eigenvalues(i - 1), g.eigenvalues(i));
  EXPECT_GE(g.eigenvalues(0), -1e-10);
}

TEST(Tgft, DiagonalizesTheDayLaplacian) {
  for (std::size_t d : {6u, 14u, 28u}) {
    const TemporalPeriodicGraph g = build_temporal_adjacency(d, 7 < d ? 7 : 3, 1.0, 1.0);
    const Matrix lam = g.eigenvectors.transpose() * g.laplacian * g.eigenvectors;
    Matrix off = lam;
    off.diagonal().setZero();
    EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((lam.diagonal() - g.eigenvalues).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Tgft, ForwardIsEigenvectorTranspose) {
  const TemporalPeriodicGraph g = build_temporal_adjacency(10, 5, 1.0, 1.0);
  const LinearTransform t = tgft_transform(g);
  EXPECT_EQ(t.forward(), g.eigenvectors.transpose());
  EXPECT_EQ(t.scale(), 1.0);
  EXPECT_LE((t.forward() * t.inverse() - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Tgft, ConstantSignalIsDcComponent) {
  const TemporalPeriodicGraph g = build_temporal_adjacency(12, 4, 1.0, 1.0);
  const Vector spectrum = tgft_transform(g).forward() * Vector::Ones(12);
  EXPECT_NEAR(std::abs(spectrum(0)), std::sqrt(12.0), 1e-10);
  EXPECT_LE(spectrum.tail(11).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(TemporalKernel, ThreePointsKernelOne) {
  const TemporalKernelLaplacian k(3, 1);
  Matrix c(3, 3);
  c << 1, 0, -1, -1, 1, 0, 0, -1, 1;
  EXPECT_EQ(k.circulant(), c);
  Matrix d(2, 3);
  d << -1, 1, 0, 0, -1, 1;
  EXPECT_EQ(Matrix(k.penalty_operator()), d);
}

TEST(TemporalKernel, CirculantMatchesExplicitConstruction) {
  for (std::size_t tau : {1u, 2u, 3u}) {
    const TemporalKernelLaplacian k(10, tau);
    EXPECT_EQ(k.circulant(), oracle::circulant(oracle::temporal_kernel(10, tau)));
    EXPECT_EQ(k.circulant() * Vector::Ones(10), Vector::Zero(10));
  }
}

TEST(TemporalKernel, TruncatedRowsHaveKernelShape) {
  const TemporalKernelLaplacian k(6, 2);
  const Matrix r = k.penalty_operator();
  ASSERT_EQ(r.rows(), 4);
  const Matrix expected = oracle::circulant(oracle::temporal_kernel(6, 2)).bottomRows(4);
  EXPECT_EQ(r, expected);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    EXPECT_EQ(r(i, i + 2), 2.0);
    EXPECT_EQ(r(i, i + 1), -1.0);
    EXPECT_EQ(r(i, i), -1.0);
    EXPECT_EQ((r.row(i).array() != 0.0).count(), 3);
  }
  EXPECT_EQ(r * Vector::Ones(6), Vector::Zero(4));
}

TEST(TemporalKernel, TruncationSelectsTrailingRows) {
  const Matrix phi = TemporalKernelLaplacian(5, 2).truncation();
  Matrix expected = Matrix::Zero(3, 5);
  expected.rightCols(3) = Matrix::Identity(3, 3);
  EXPECT_EQ(phi, expected);
}

TEST(TemporalKernel, KernelSizeOutOfRangeThrows) {
  EXPECT_THROW(TemporalKernelLaplacian(3, 3), ParameterError);
  EXPECT_THROW(TemporalKernelLaplacian(3, 0), ParameterError);
}

TEST(TemporalKernel, RemarkSpecialCases) {
  for (std::size_t T : {3u, 8u, 20u}) {
    EXPECT_EQ(Matrix(TemporalKernelLaplacian(T, 1, TemporalOperator::circulant).penalty_operator()),
              oracle::toeplitz_first_order(T));
    EXPECT_EQ(Matrix(TemporalKernelLaplacian(T, 1, TemporalOperator::truncated).penalty_operator()),
              oracle::quadratic_variation(T));
    for (std::size_t tau = 1; tau < std::min<std::size_t>(T, 4); ++tau) {
      EXPECT_EQ(Matrix(TemporalKernelLaplacian(T, tau, TemporalOperator::symmetric_circulant).penalty_operator()),
                oracle::symmetric_circulant(T, tau));
    }
  }
}

TEST(TemporalKernel, GramIsOperatorGram) {
  const TemporalKernelLaplacian k(12, 3);
  const Matrix r = k.penalty_operator();
  EXPECT_LE((Matrix(k.gram()) - r.transpose() * r).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(GtcrPenalty, ConstantColumnsGiveZero) {
  EXPECT_EQ(gtcr_penalty(Matrix::Constant(9, 3, 4.2), TemporalKernelLaplacian(9, 2)), 0.0);
}

TEST(GtcrPenalty, HandComputedColumn) {
  Vector z(3);
  z << 0, 1, 3;
  EXPECT_DOUBLE_EQ(gtcr_penalty(z, TemporalKernelLaplacian(3, 1)), 5.0);
}

TEST(GtcrPenalty, HomogeneousOfDegreeTwo) {
  std::mt19937_64 rng(2);
  const Matrix z = testing::gaussian(10, 3, rng);
  const TemporalKernelLaplacian k(10, 2);
  EXPECT_NEAR(gtcr_penalty(3.0 * z, k), 9.0 * gtcr_penalty(z, k), 1e-10 * gtcr_penalty(z, k));
}

TEST(GtcrPenalty, ShapeMismatchThrows) {
  EXPECT_THROW(gtcr_penalty(Matrix::Zero(4, 2), TemporalKernelLaplacian(5, 1)), ShapeError);
}

}  // namespace
}  // namespace letc
