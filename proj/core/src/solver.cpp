#include "letc/solver.hpp"

#include "letc/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace letc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

}  // namespace

void ObservationSet::validate() const {
  if (observed.rows() != values.rows() || observed.cols() != values.cols())
    throw ShapeError("ObservationSet: mask shape differs from values");
  if (held_out.size() != 0 && (held_out.rows() != values.rows() || held_out.cols() != values.cols()))
    throw ShapeError("ObservationSet: held-out mask shape differs from values");
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      if (observed(i, j) && !std::isfinite(values(i, j))) {
        throw ParameterError("ObservationSet: observed entry (" + std::to_string(i) + ", " +
                             std::to_string(j) + ") is not finite");
      }
      if (held_out.size() != 0 && observed(i, j) && held_out(i, j)) {
        throw ParameterError("ObservationSet: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") is both observed and held out");
      }
    }
  }
}

void SolverConfig::validate() const {
  require(intervals_per_day >= 1, "config: intervals_per_day must be >= 1");
  require(lambda_spatial >= 0.0 && std::isfinite(lambda_spatial), "config: lambda_spatial must be >= 0");
  require(lambda_temporal >= 0.0 && std::isfinite(lambda_temporal), "config: lambda_temporal must be >= 0");
  require(kernel_size >= 1, "config: kernel_size must be >= 1");
  require(mu_init > 0.0 && std::isfinite(mu_init), "config: mu_init must be > 0");
  require(mu_growth >= 1.0 && std::isfinite(mu_growth), "config: mu_growth must be >= 1");
  require(mu_max >= mu_init, "config: mu_max must be >= mu_init");
  require(tolerance > 0.0, "config: tolerance must be > 0");
  require(max_iters >= 1, "config: max_iters must be >= 1");
  require(cg_iters >= 1, "config: cg_iters must be >= 1");
  require(rank_init >= 1, "config: rank_init must be >= 1");
  require(!rank_cap || *rank_cap >= 1, "config: rank_cap must be >= 1");
  require(period >= 1, "config: period must be >= 1");
  require(day_weight >= 0.0 && period_weight >= 0.0, "config: temporal weights must be >= 0");
}

std::size_t effective_rank_cap(std::size_t rows, std::size_t cols, const SolverConfig& config) {
  const std::size_t small = std::min(rows, cols);
  if (small < 2) return 0;
  std::size_t cap = config.rank_cap.value_or(
      small > config.oversample + 1 ? small - config.oversample - 1 : 1);
  return std::clamp<std::size_t>(cap, 1, small - 1);
}

LetcOperators build_operators(std::size_t intervals_per_day, std::size_t days,
                              const SpatialGraph& graph, const SolverConfig& config) {
  TemporalAdjacencyParams params;
  params.days = days;
  params.period = std::min(config.period, days);
  params.day_weight = config.day_weight;
  params.period_weight = config.period_weight;
  params.decay = config.decay;
  params.weekend = config.weekend;
  if (params.weekend && 2 * params.weekend->days > params.period + 1) params.weekend.reset();
  const TemporalPeriodicGraph day_graph = build_temporal_adjacency(params);
  return LetcOperators{tgft_transform(day_graph), spatial_laplacian(graph, config.diffusion),
                       TemporalKernelLaplacian(intervals_per_day * days, config.kernel_size,
                                               config.temporal_operator)};
}

ZSystem::ZSystem(const LetcOperators& ops, double lambda_spatial, double lambda_temporal)
    : ZSystem(ops.spatial, ops.temporal.gram(), lambda_spatial, lambda_temporal) {}

ZSystem::ZSystem(const SparseMatrix& spatial_laplacian, const SparseMatrix& temporal_gram,
                 double lambda_spatial, double lambda_temporal)
    : spatial_gram_(SparseMatrix(spatial_laplacian.transpose()) * spatial_laplacian),
      temporal_gram_(temporal_gram),
      lambda_spatial_(lambda_spatial),
      lambda_temporal_(lambda_temporal) {
  spatial_gram_.prune(0.0);
  const double fill = spatial_gram_.rows() == 0
                          ? 0.0
                          : static_cast<double>(spatial_gram_.nonZeros()) /
                                static_cast<double>(spatial_gram_.rows() * spatial_gram_.cols());
  if (fill > 0.25) spatial_gram_dense_ = Matrix(spatial_gram_);
}

Matrix ZSystem::apply(const Matrix& q, double mu) const {
  Matrix out = mu * q;
  if (lambda_spatial_ != 0.0) {
    if (spatial_gram_dense_)
      out.noalias() += lambda_spatial_ * (q * *spatial_gram_dense_);
    else
      out.noalias() += lambda_spatial_ * (q * spatial_gram_);
  }
  if (lambda_temporal_ != 0.0) out.noalias() += lambda_temporal_ * (temporal_gram_ * q);
  return out;
}

Tensor3 x_update(const SolverState& state, const SolverConfig& config,
                 const LinearTransform& transform, std::mt19937_64& rng, double* tnn) {
  if (!(state.mu > 0.0)) throw ParameterError("x_update: mu must be > 0");
  Tensor3 m = tensorize(state.z, config.intervals_per_day);
  if (!state.y.empty()) m -= state.y * (1.0 / state.mu);
  const double threshold = 1.0 / state.mu;

  const std::size_t cap = effective_rank_cap(m.dim1(), m.dim2(), config);
  SvtResult r;
  if (config.exact_svt || cap == 0) {
    r = t_svt_with_norm(m, transform, threshold, config.threads);
  } else {
    SketchParams sketch;
    sketch.rank = std::clamp<std::size_t>(state.rank, 1, cap);
    sketch.power_iters = config.power_iters;
    sketch.oversample = config.oversample;
    r = randomized_t_svt_with_norm(m, transform, threshold, sketch, rng, config.threads);
  }
  if (tnn) *tnn = r.tnn;
  return std::move(r.value);
}

Matrix z_update_cg(const Matrix& z0, const Tensor3& x, const Tensor3& y, double mu,
                   const ZSystem& system, std::size_t iters, CgReport* report,
                   KrylovMethod method) {
  if (!(mu > 0.0)) throw ParameterError("z_update_cg: mu must be > 0");
  if (iters < 1) throw ParameterError("z_update_cg: need at least one iteration");
  const Matrix xm = matricize(x);
  if (xm.rows() != z0.rows() || xm.cols() != z0.cols()) throw ShapeError("z_update_cg: X and Z disagree");

  Matrix rhs = mu * xm;
  if (!y.empty()) {
    require_same_shape(x, y, "z_update_cg");
    rhs += matricize(y);
  }

  Matrix z = z0;
  Matrix r = rhs - system.apply(z, mu);
  Matrix q = r;
  double rr = r.squaredNorm();
  const double floor = std::pow(std::numeric_limits<double>::epsilon() * rhs.norm(), 2);

  auto diverged = [&](std::size_t i, double rr_next, double curvature) {
    std::ostringstream msg;
    msg << "z_update_cg diverged at inner iteration " << i << ": |r|^2=" << rr_next
        << " curvature=" << curvature << " mu=" << mu << " lambda_spatial=" << system.lambda_spatial()
        << " lambda_temporal=" << system.lambda_temporal() << " |Z0|=" << z0.norm()
        << " |rhs|=" << rhs.norm() << " shape=" << z.rows() << "x" << z.cols();
    return NumericError(msg.str());
  };

  CgReport local;
  local.residual_norms.push_back(std::sqrt(rr));
  if (method == KrylovMethod::conjugate_gradient) {
    for (std::size_t i = 0; i < iters; ++i) {
      if (rr <= floor || rr == 0.0) break;
      const Matrix vq = system.apply(q, mu);
      const double curvature = q.cwiseProduct(vq).sum();
      const double alpha = rr / curvature;
      z.noalias() += alpha * q;
      r.noalias() -= alpha * vq;
      const double rr_next = r.squaredNorm();
      if (!std::isfinite(rr_next) || !std::isfinite(alpha) || !(curvature > 0.0))
        throw diverged(i, rr_next, curvature);
      q = r + (rr_next / rr) * q;
      rr = rr_next;
      ++local.iterations;
      local.residual_norms.push_back(std::sqrt(rr));
    }
  } else {
    Matrix vr = system.apply(r, mu);
    Matrix vq = vr;
    double rvr = r.cwiseProduct(vr).sum();
    for (std::size_t i = 0; i < iters; ++i) {
      if (rr <= floor || rr == 0.0) break;
      const double curvature = vq.squaredNorm();
      const double alpha = rvr / curvature;
      z.noalias() += alpha * q;
      r.noalias() -= alpha * vq;
      const double rr_next = r.squaredNorm();
      if (!std::isfinite(rr_next) || !std::isfinite(alpha) || !(curvature > 0.0) || !(rvr > 0.0))
        throw diverged(i, rr_next, curvature);
      vr = system.apply(r, mu);
      const double rvr_next = r.cwiseProduct(vr).sum();
      const double beta = rvr_next / rvr;
      q = r + beta * q;
      vq = vr + beta * vq;
      rvr = rvr_next;
      rr = rr_next;
      ++local.iterations;
      local.residual_norms.push_back(std::sqrt(rr));
    }
  }
  if (report) *report = std::move(local);
  return z;
}

Matrix z_update_cg(const SolverState& state, const SolverConfig& config, const ZSystem& system,
                   CgReport* report) {
  return z_update_cg(state.z, state.x, state.y, state.mu, system, config.cg_iters, report,
                     config.krylov);
}

Tensor3 dual_update(const SolverState& state, double mu) {
  Tensor3 gap = state.x - tensorize(state.z, state.x.dim1());
  if (state.y.empty()) return gap * mu;
  return state.y + gap * mu;
}

Matrix transmit_observations(Matrix z, const ObservationSet& obs) {
  if (z.rows() != obs.values.rows() || z.cols() != obs.values.cols() ||
      obs.observed.rows() != z.rows() || obs.observed.cols() != z.cols()) {
    throw ShapeError("transmit_observations: shape mismatch");
  }
  z = obs.observed.select(obs.values, z);
  return z;
}

double augmented_lagrangian(const Tensor3& x, const Matrix& z, const Tensor3& y, double mu,
                            const LetcOperators& ops, const SolverConfig& config,
                            std::optional<double> tnn) {
  const double nuclear = tnn ? *tnn : t_tnn(x, ops.transform, config.threads);
  const Matrix zl = z * SparseMatrix(ops.spatial.transpose());
  const double spatial = zl.squaredNorm();
  const double temporal = (ops.temporal.penalty_operator() * z).squaredNorm();
  const Tensor3 gap = x - tensorize(z, x.dim1());
  double inner = 0.0;
  if (!y.empty()) {
    require_same_shape(x, y, "augmented_lagrangian");
    inner = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()))
                .dot(Eigen::Map<const Vector>(gap.data(), static_cast<Eigen::Index>(gap.size())));
  }
  const double g = gap.frobenius_norm();
  return nuclear + 0.5 * config.lambda_spatial * spatial + 0.5 * config.lambda_temporal * temporal +
         inner + 0.5 * mu * g * g;
}

SolveResult solve(const ObservationSet& obs, const SpatialGraph& graph, const SolverConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(obs.values.cols()) != graph.nodes())
    throw ShapeError("solve: value columns do not match graph nodes");
  const auto rows = static_cast<std::size_t>(obs.values.rows());
  if (rows % config.intervals_per_day != 0)
    throw ShapeError("solve: row count is not a multiple of intervals_per_day");
  const LetcOperators ops =
      build_operators(config.intervals_per_day, rows / config.intervals_per_day, graph, config);
  return solve(obs, ops, config);
}

SolveResult solve(const ObservationSet& obs, const LetcOperators& ops, const SolverConfig& config) {
  const auto start = Clock::now();
  config.validate();
  obs.validate();
  const std::size_t ipd = config.intervals_per_day;
  const auto rows = static_cast<std::size_t>(obs.values.rows());
  const auto cols = static_cast<std::size_t>(obs.values.cols());
  if (rows == 0 || cols == 0 || rows % ipd != 0)
    throw ShapeError("solve: row count must be a positive multiple of intervals_per_day");
  const std::size_t days = rows / ipd;
  if (ops.transform.size() != days || ops.temporal.horizon() != rows ||
      static_cast<std::size_t>(ops.spatial.rows()) != cols) {
    throw ShapeError("solve: operators do not match the observation shape");
  }

  const ZSystem system(ops, config.lambda_spatial, config.lambda_temporal);
  std::mt19937_64 rng(config.seed);

  SolveResult result;
  SolverState& s = result.state;
  s.z = Matrix::Zero(obs.values.rows(), obs.values.cols());
  if (config.init == InitFill::column_mean) {
    const double global = obs.observed_count() > 0
                              ? obs.observed.select(obs.values, 0.0).sum() / static_cast<double>(obs.observed_count())
                              : 0.0;
    for (Eigen::Index j = 0; j < s.z.cols(); ++j) {
      const auto n = obs.observed.col(j).count();
      const double mean = n > 0 ? obs.observed.col(j).select(obs.values.col(j), 0.0).sum() / static_cast<double>(n)
                                : global;
      s.z.col(j).setConstant(mean);
    }
  }
  s.z = transmit_observations(std::move(s.z), obs);
  s.y = Tensor3(ipd, cols, days);
  s.x = Tensor3(ipd, cols, days);
  s.mu = config.mu_init;
  s.rank = config.rank_init;
  const std::size_t cap = effective_rank_cap(ipd, cols, config);

  Diagnostics& d = result.diagnostics;
  double best_change = std::numeric_limits<double>::infinity();
  Matrix best_z = s.z;

  for (std::size_t it = 0; it < config.max_iters; ++it) {
    IterationRecord rec;
    rec.iteration = it + 1;
    rec.mu = s.mu;
    rec.rank = cap == 0 ? 0 : std::clamp<std::size_t>(s.rank, 1, cap);

    auto t0 = Clock::now();
    double tnn = 0.0;
    s.x = x_update(s, config, ops.transform, rng, &tnn);
    rec.x_seconds = seconds_since(t0);

    t0 = Clock::now();
    CgReport cg;
    Matrix z_next = z_update_cg(s, config, system, &cg);
    z_next = transmit_observations(std::move(z_next), obs);
    rec.z_seconds = seconds_since(t0);
    rec.cg_iterations = cg.iterations;
    rec.cg_residual = cg.residual_norms.back();

    const double prev_norm = s.z.norm();
    const double diff = (z_next - s.z).norm();
    rec.change = prev_norm > 0.0 ? diff / prev_norm : (diff > 0.0 ? 1.0 : 0.0);
    s.z = std::move(z_next);
    s.y = dual_update(s, s.mu);

    rec.objective = config.track_objective
                        ? augmented_lagrangian(s.x, s.z, s.y, s.mu, ops, config, tnn)
                        : std::numeric_limits<double>::quiet_NaN();
    if (config.track_objective) s.objective_trace.push_back(rec.objective);

    s.iteration = rec.iteration;
    s.change = rec.change;
    if (rec.change < best_change) {
      best_change = rec.change;
      best_z = s.z;
      d.best_iteration = rec.iteration;
    }

    s.mu = std::min(config.mu_growth * s.mu, config.mu_max);
    s.rank = std::min(s.rank + config.rank_step, std::max<std::size_t>(cap, 1));

    d.x_seconds += rec.x_seconds;
    d.z_seconds += rec.z_seconds;
    d.trace.push_back(rec);
    if (rec.change < config.tolerance) {
      d.converged = true;
      break;
    }
  }

  d.iterations = s.iteration;
  result.z_hat = d.converged ? s.z : std::move(best_z);
  d.total_seconds = seconds_since(start);
  return result;
}

}  // namespace letc
