#pragma once

#include "letc/solver.hpp"
#include "letc/spatial.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace letc {

/// Speed observations plus the sensor graph description they came with.
struct SpeedDataset {
  Matrix values;  // (I*K) x J; NaN marks a missing reading
  std::size_t intervals_per_day = 0;
  std::size_t days = 0;
  std::vector<std::string> location_ids;
  std::vector<DistanceEdge> edges;    // set when the graph came as an edge list
  std::optional<Matrix> coordinates;  // J x 2 when the graph came as a coordinate table

  std::size_t locations() const { return static_cast<std::size_t>(values.cols()); }
  Mask observed() const { return values.array().isFinite(); }
  void validate() const;
};

struct GraphOptions {
  std::optional<double> sigma;  // default: std of the distances
  double delta = 1.0;
  DegreeMode degree_mode = DegreeMode::out;
  // Coordinate tables carry no edges: every ordered pair whose kernel
  // weight reaches this value becomes one.
  double coordinate_weight_threshold = 0.1;
};

SpatialGraph build_spatial_graph(const SpeedDataset& ds, const GraphOptions& options = {});

/// Reads a value table (header of location ids, one row per time point,
/// empty cell = missing) and a graph table: either `src,dst,distance` or
/// `id,x,y` rows. Throws IngestionError with file and line on bad input.
SpeedDataset load_dataset(const std::filesystem::path& values, const std::filesystem::path& graph,
                          std::size_t intervals_per_day);

/// Writes a value table; NaN entries become empty cells. Numbers are printed
/// with enough digits to read back bit-exactly.
void write_value_table(std::ostream& out, const Matrix& values, std::span<const std::string> ids);
void write_value_table(const std::filesystem::path& path, const Matrix& values,
                       std::span<const std::string> ids);
void write_edge_table(const std::filesystem::path& path, std::span<const DistanceEdge> edges,
                      std::span<const std::string> ids);

/// Structured missingness: whole locations (columns), whole time intervals
/// (rows over the I*K axis), then random elements among what remains.
struct MaskScenario {
  double sm_rate = 0.0;
  double tm_rate = 0.0;
  double em_rate = 0.0;
  std::uint64_t seed = 0;

  std::string label() const;
  void validate() const;
};

/// floor(rate * count + 0.5).
std::size_t masked_count(double rate, std::size_t count);

struct ScenarioResult {
  ObservationSet observations;
  Matrix truth;  // the dataset values (NaN where never observed)
  std::vector<std::size_t> hidden_locations;
  std::vector<std::size_t> hidden_intervals;
  std::size_t hidden_elements = 0;
};

ScenarioResult apply_scenario(const SpeedDataset& ds, const MaskScenario& sc);

struct SyntheticData {
  SpeedDataset dataset;  // noisy observations + directed edge list
  Matrix truth;          // noiseless field
  Matrix coordinates;    // J x 2 node positions
};

/// Desk-scale stand-in for a speed dataset: a random geometric directed graph
/// and a rank-3 daily pattern (smooth spatial loadings, period-T day
/// modulation), smoothed once by the one-step diffusion operator, plus
/// Gaussian noise.
SyntheticData generate_synthetic(std::size_t locations, std::size_t intervals_per_day,
                                 std::size_t days, std::size_t period, double noise_sd,
                                 std::uint64_t seed);

inline constexpr std::size_t kSyntheticBasisCount = 3;
inline constexpr double kSyntheticRadiusPercentile = 0.20;

/// Reference kriging estimate: each missing entry takes the mean of the
/// observed values of its graph neighbours (either direction) at the same
/// time point, falling back to the row mean, then the global mean.
Matrix neighbor_mean_baseline(const ObservationSet& obs, const SpatialGraph& graph);

struct SweepRow {
  std::string scenario;
  std::uint64_t seed = 0;
  double lambda_spatial = 0.0;
  double lambda_temporal = 0.0;
  std::size_t kernel_size = 0;
  std::size_t config_index = 0;
  std::optional<Metrics> metrics;
  std::size_t iterations = 0;
  double seconds = 0.0;
  bool converged = false;
  std::string error;  // empty on success
};

struct SweepSummary {
  std::string scenario;
  std::size_t config_index = 0;
  double lambda_spatial = 0.0;
  double lambda_temporal = 0.0;
  std::size_t kernel_size = 0;
  std::size_t runs = 0;  // successful cells
  double mae_mean = 0.0, mae_std = 0.0;
  double rmse_mean = 0.0, rmse_std = 0.0;
  std::optional<double> wmape_mean, wmape_std;
};

/// Cartesian product scenarios x configs x repeats. Repeat r uses mask seed
/// scenario.seed + r. A failing cell is recorded and the sweep continues.
std::vector<SweepRow> run_sweep(const SpeedDataset& ds, const SpatialGraph& graph,
                                std::span<const MaskScenario> scenarios,
                                std::span<const SolverConfig> configs, std::size_t repeats = 1,
                                unsigned threads = 1);

/// Mean and sample standard deviation per (scenario, config).
std::vector<SweepSummary> summarize(std::span<const SweepRow> rows);

/// Columns: scenario,seed,lambda1,lambda2,tau,MAE,RMSE,WMAPE,iters,seconds,status
void write_results_table(std::ostream& out, std::span<const SweepRow> rows);
void write_summary_table(std::ostream& out, std::span<const SweepSummary> rows);

}  // namespace letc
