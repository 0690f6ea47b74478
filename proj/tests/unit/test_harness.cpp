#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace letc {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("letc_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string ingestion_message(const fs::path& values, const fs::path& graph, std::size_t ipd) {
  try {
    load_dataset(values, graph, ipd);
  } catch (const IngestionError& e) {
    return e.what();
  }
  return {};
}

TEST(LoadDataset, SmallTableWithEdgeList) {
  TempDir d;
  const auto v = d.write("v.csv", "a,b\n1,2\n3,4\n5,6\n7,8\n");
  const auto g = d.write("g.csv", "src,dst,distance\na,b,1.5\n");
  const SpeedDataset ds = load_dataset(v, g, 2);
  EXPECT_EQ(ds.days, 2u);
  EXPECT_EQ(ds.intervals_per_day, 2u);
  EXPECT_EQ(ds.location_ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(ds.values(3, 1), 8.0);
  ASSERT_EQ(ds.edges.size(), 1u);
  EXPECT_EQ(ds.edges[0].src, 0u);
  EXPECT_EQ(ds.edges[0].dst, 1u);
  EXPECT_EQ(ds.edges[0].distance, 1.5);
}

TEST(LoadDataset, EmptyCellIsMissing) {
  TempDir d;
  const auto v = d.write("v.csv", "a,b\n1,\n3,4\n");
  const auto g = d.write("g.csv", "a,b,1\n");
  const SpeedDataset ds = load_dataset(v, g, 1);
  EXPECT_TRUE(std::isnan(ds.values(0, 1)));
  EXPECT_FALSE(ds.observed()(0, 1));
  EXPECT_EQ(ds.observed().count(), 3);
}

TEST(LoadDataset, CoordinateTableGivesEuclideanDistances) {
  TempDir d;
  const auto v = d.write("v.csv", "a\tb\tc\n1\t2\t3\n");
  const auto g = d.write("g.csv", "id\tx\ty\na\t0\t0\nb\t3\t4\nc\t0\t1\n");
  const SpeedDataset ds = load_dataset(v, g, 1);
  ASSERT_TRUE(ds.coordinates.has_value());
  EXPECT_EQ((*ds.coordinates)(1, 0), 3.0);
  const SpatialGraph graph = build_spatial_graph(ds);
  EXPECT_EQ(graph.nodes(), 3u);
  EXPECT_GT(Matrix(graph.adjacency())(0, 2), 0.0);
}

TEST(LoadDataset, UnknownIdIsNamed) {
  TempDir d;
  const auto v = d.write("v.csv", "a,b\n1,2\n");
  const auto g = d.write("g.csv", "src,dst,distance\na,b,1\nb,zz,2\n");
  const std::string msg = ingestion_message(v, g, 1);
  EXPECT_NE(msg.find("'zz'"), std::string::npos) << msg;
  EXPECT_NE(msg.find(":3:"), std::string::npos) << msg;
}

TEST(LoadDataset, DescriptiveErrors) {
  TempDir d;
  const auto g = d.write("g.csv", "src,dst,distance\na,b,1\n");
  const auto ragged = d.write("ragged.csv", "a,b\n1,2\n3\n");
  EXPECT_NE(ingestion_message(ragged, g, 1).find(":3:"), std::string::npos);
  const auto odd = d.write("odd.csv", "a,b\n1,2\n3,4\n5,6\n");
  EXPECT_NE(ingestion_message(odd, g, 2).find("multiple of 2"), std::string::npos);
  const auto bad = d.write("bad.csv", "a,b\n1,x\n");
  EXPECT_NE(ingestion_message(bad, g, 1).find(":2:"), std::string::npos);
  const auto sentinel = d.write("nan.csv", "a,b\n1,nan\n");
  EXPECT_FALSE(ingestion_message(sentinel, g, 1).empty());
  const auto v = d.write("v.csv", "a,b\n1,2\n");
  const auto neg = d.write("neg.csv", "src,dst,distance\na,b,-1\n");
  EXPECT_NE(ingestion_message(v, neg, 1).find("negative"), std::string::npos);
  const std::string missing = ingestion_message(d.path() / "absent.csv", g, 1);
  EXPECT_NE(missing.find("absent.csv"), std::string::npos);
  const auto dup = d.write("dup.csv", "a,a\n1,2\n");
  EXPECT_NE(ingestion_message(dup, g, 1).find("duplicate"), std::string::npos);
}

TEST(LoadDataset, HeaderlessAmbiguousGraphIsRejected) {
  TempDir d;
  // Ids that also read as numbers make both readings valid.
  const auto v = d.write("v.csv", "1,2\n5,6\n");
  const auto g = d.write("g.csv", "1,2,3\n2,1,3\n");
  EXPECT_NE(ingestion_message(v, g, 1).find("cannot tell"), std::string::npos);
}

TEST(LoadDataset, ValueTableRoundTripsBitExactly) {
  TempDir d;
  std::mt19937_64 rng(1);
  Matrix m = testing::gaussian(4, 3, rng) * 1e3;
  m(1, 2) = std::numeric_limits<double>::quiet_NaN();
  const std::vector<std::string> ids{"x", "y", "z"};
  write_value_table(d.path() / "v.csv", m, ids);
  const std::vector<DistanceEdge> edges{{0, 1, 2.0}, {2, 0, 0.5}};
  write_edge_table(d.path() / "g.csv", edges, ids);
  const SpeedDataset ds = load_dataset(d.path() / "v.csv", d.path() / "g.csv", 2);
  for (Eigen::Index q = 0; q < m.size(); ++q) {
    if (std::isnan(m(q))) EXPECT_TRUE(std::isnan(ds.values(q)));
    else EXPECT_EQ(ds.values(q), m(q));
  }
  EXPECT_EQ(ds.edges.size(), 2u);
}

SpeedDataset grid_dataset(std::size_t ipd, std::size_t days, std::size_t locations) {
  SpeedDataset ds;
  ds.intervals_per_day = ipd;
  ds.days = days;
  ds.values = Matrix::Constant(static_cast<Eigen::Index>(ipd * days), static_cast<Eigen::Index>(locations), 1.0);
  for (std::size_t j = 0; j < locations; ++j) ds.location_ids.push_back("n" + std::to_string(j));
  return ds;
}

TEST(ApplyScenario, ZeroRatesKeepTheOriginalMask) {
  SpeedDataset ds = grid_dataset(4, 2, 5);
  ds.values(3, 2) = std::numeric_limits<double>::quiet_NaN();
  const ScenarioResult r = apply_scenario(ds, MaskScenario{0.0, 0.0, 0.0, 3});
  EXPECT_TRUE((r.observations.observed == ds.observed()).all());
  EXPECT_EQ(r.observations.held_out_count(), 0u);
}

TEST(ApplyScenario, HalfOfFourLocationsHidden) {
  const ScenarioResult r = apply_scenario(grid_dataset(3, 2, 4), MaskScenario{0.5, 0.0, 0.0, 7});
  int hidden = 0;
  for (Eigen::Index j = 0; j < 4; ++j) hidden += r.observations.observed.col(j).any() ? 0 : 1;
  EXPECT_EQ(hidden, 2);
  EXPECT_EQ(r.hidden_locations.size(), 2u);
}

TEST(ApplyScenario, SameSeedSameMasks) {
  const SpeedDataset ds = grid_dataset(6, 3, 10);
  const MaskScenario sc{0.3, 0.2, 0.2, 42};
  const ScenarioResult a = apply_scenario(ds, sc);
  const ScenarioResult b = apply_scenario(ds, sc);
  EXPECT_TRUE((a.observations.observed == b.observations.observed).all());
  EXPECT_TRUE((a.observations.held_out == b.observations.held_out).all());
  MaskScenario other = sc;
  other.seed = 43;
  EXPECT_FALSE((apply_scenario(ds, other).observations.observed == a.observations.observed).all());
}

TEST(ApplyScenario, CountsFollowTheRoundingRule) {
  SpeedDataset ds = grid_dataset(8, 3, 17);
  std::mt19937_64 rng(5);
  std::bernoulli_distribution gap(0.05);
  for (Eigen::Index q = 0; q < ds.values.size(); ++q)
    if (gap(rng)) ds.values(q) = std::numeric_limits<double>::quiet_NaN();
  const Mask orig = ds.observed();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MaskScenario sc{0.3, 0.25, 0.2, seed};
    const ScenarioResult r = apply_scenario(ds, sc);
    EXPECT_EQ(r.hidden_locations.size(), masked_count(0.3, 17));
    EXPECT_EQ(r.hidden_intervals.size(), masked_count(0.25, 24));
    Mask surviving = orig;
    for (std::size_t j : r.hidden_locations) surviving.col(static_cast<Eigen::Index>(j)).setConstant(false);
    for (std::size_t i : r.hidden_intervals) surviving.row(static_cast<Eigen::Index>(i)).setConstant(false);
    const auto remaining = static_cast<std::size_t>(surviving.count());
    EXPECT_EQ(r.hidden_elements, masked_count(0.2, remaining));
    EXPECT_EQ(r.observations.observed_count(), remaining - r.hidden_elements);
    // Ω_m and P partition the originally observed entries.
    EXPECT_FALSE((r.observations.observed && r.observations.held_out).any());
    EXPECT_TRUE(((r.observations.observed || r.observations.held_out) == orig).all());
    for (Eigen::Index q = 0; q < r.truth.size(); ++q)
      if (r.observations.held_out(q)) ASSERT_TRUE(std::isfinite(r.truth(q)));
  }
}

TEST(ApplyScenario, InvalidRatesThrow) {
  const SpeedDataset ds = grid_dataset(2, 2, 3);
  EXPECT_THROW(apply_scenario(ds, MaskScenario{1.0, 0.0, 0.0, 1}), ParameterError);
  EXPECT_THROW(apply_scenario(ds, MaskScenario{-0.1, 0.0, 0.0, 1}), ParameterError);
  EXPECT_THROW(apply_scenario(ds, MaskScenario{0.9, 0.0, 0.0, 1}), ParameterError);
}

TEST(MaskScenario, LabelAndRounding) {
  EXPECT_EQ((MaskScenario{0.3, 0.2, 0.2, 0}).label(), "SM30-TM20-EM20");
  EXPECT_EQ(masked_count(0.5, 5), 3u);
  EXPECT_EQ(masked_count(0.3, 17), 5u);
  EXPECT_EQ(masked_count(0.0, 9), 0u);
}

TEST(Synthetic, NoiselessObservationsEqualTruth) {
  const SyntheticData s = generate_synthetic(12, 8, 6, 3, 0.0, 4);
  EXPECT_EQ(s.dataset.values, s.truth);
  s.dataset.validate();
}

TEST(Synthetic, FixedSeedRegeneratesBitIdentically) {
  const SyntheticData a = generate_synthetic(15, 6, 4, 2, 1.0, 9);
  const SyntheticData b = generate_synthetic(15, 6, 4, 2, 1.0, 9);
  EXPECT_EQ(a.dataset.values, b.dataset.values);
  EXPECT_EQ(a.truth, b.truth);
  ASSERT_EQ(a.dataset.edges.size(), b.dataset.edges.size());
  for (std::size_t q = 0; q < a.dataset.edges.size(); ++q) {
    EXPECT_EQ(a.dataset.edges[q].src, b.dataset.edges[q].src);
    EXPECT_EQ(a.dataset.edges[q].distance, b.dataset.edges[q].distance);
  }
  EXPECT_NE(generate_synthetic(15, 6, 4, 2, 1.0, 10).dataset.values, a.dataset.values);
}

TEST(Synthetic, DailySlicesHaveBasisRank) {
  const SyntheticData s = generate_synthetic(40, 24, 7, 7, 0.0, 2);
  const Tensor3 x = tensorize(s.truth, 24);
  for (std::size_t k = 0; k < 7; ++k) {
    Eigen::JacobiSVD<Matrix> svd(Matrix(x.slice(k)));
    const Vector sv = svd.singularValues();
    EXPECT_LE(sv(kSyntheticBasisCount), 1e-8 * sv(0)) << "day " << k;
  }
}

TEST(Synthetic, ParameterValidation) {
  EXPECT_THROW(generate_synthetic(1, 4, 4, 2, 0.0, 1), ParameterError);
  EXPECT_THROW(generate_synthetic(4, 4, 4, 2, -1.0, 1), ParameterError);
}

TEST(Baseline, NeighbourMeanFillsHiddenEntries) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = a(1, 2) = 1.0;
  const SpatialGraph g(a.sparseView());
  ObservationSet obs;
  obs.values.resize(2, 3);
  obs.values << 10, 0, 30, 1, 2, 3;
  obs.observed = Mask::Constant(2, 3, true);
  obs.observed(0, 1) = false;
  obs.held_out = Mask::Constant(2, 3, false);
  const Matrix est = neighbor_mean_baseline(obs, g);
  EXPECT_DOUBLE_EQ(est(0, 1), 20.0);
  EXPECT_EQ(est(1, 1), 2.0);
}

struct SweepFixture {
  SyntheticData data = generate_synthetic(20, 8, 4, 2, 0.5, 3);
  SpatialGraph graph = build_spatial_graph(data.dataset);
  SolverConfig base() const {
    SolverConfig c;
    c.intervals_per_day = 8;
    c.period = 2;
    c.rank_init = 2;
    c.oversample = 2;
    c.max_iters = 30;
    return c;
  }
};

TEST(Sweep, SingleCellGivesSingleRow) {
  SweepFixture f;
  const std::vector<MaskScenario> sc{{0.2, 0.1, 0.1, 1}};
  const std::vector<SolverConfig> cfg{f.base()};
  const auto rows = run_sweep(f.data.dataset, f.graph, sc, cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].error.empty()) << rows[0].error;
  EXPECT_TRUE(rows[0].metrics.has_value());
}

TEST(Sweep, CartesianProductAndRepeatSummary) {
  SweepFixture f;
  const std::vector<MaskScenario> sc{{0.2, 0.1, 0.1, 1}, {0.3, 0.0, 0.2, 5}};
  std::vector<SolverConfig> cfg;
  for (double l1 : {0.0, 0.01, 0.1}) {
    SolverConfig c = f.base();
    c.lambda_spatial = l1;
    cfg.push_back(c);
  }
  const auto rows = run_sweep(f.data.dataset, f.graph, sc, cfg, 1, 2);
  EXPECT_EQ(rows.size(), 6u);

  const std::vector<MaskScenario> one{sc[0]};
  const std::vector<SolverConfig> single{cfg[1]};
  const auto repeated = run_sweep(f.data.dataset, f.graph, one, single, 5);
  ASSERT_EQ(repeated.size(), 5u);
  std::set<std::uint64_t> seeds;
  for (const SweepRow& r : repeated) seeds.insert(r.seed);
  EXPECT_EQ(seeds.size(), 5u);
  const auto summary = summarize(repeated);
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].runs, 5u);
  EXPECT_GE(summary[0].mae_std, 0.0);
  EXPECT_GE(summary[0].rmse_std, 0.0);
}

TEST(Sweep, ParallelCellsMatchSerialCells) {
  SweepFixture f;
  const std::vector<MaskScenario> sc{{0.2, 0.1, 0.1, 1}};
  std::vector<SolverConfig> cfg{f.base(), f.base()};
  cfg[1].lambda_temporal = 1.0;
  const auto serial = run_sweep(f.data.dataset, f.graph, sc, cfg, 2, 1);
  const auto parallel = run_sweep(f.data.dataset, f.graph, sc, cfg, 2, 3);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t q = 0; q < serial.size(); ++q) {
    EXPECT_EQ(serial[q].metrics->mae, parallel[q].metrics->mae);
    EXPECT_EQ(serial[q].iterations, parallel[q].iterations);
  }
}

TEST(Sweep, FailingCellIsRecorded) {
  SweepFixture f;
  const std::vector<MaskScenario> sc{{0.2, 0.1, 0.1, 1}};
  std::vector<SolverConfig> cfg{f.base(), f.base()};
  cfg[0].tolerance = -1.0;
  const auto rows = run_sweep(f.data.dataset, f.graph, sc, cfg);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_TRUE(rows[1].error.empty());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

TEST(Sweep, MetricsReadBackFromTables) {
  SweepFixture f;
  const std::vector<MaskScenario> sc{{0.2, 0.1, 0.1, 1}};
  const std::vector<SolverConfig> cfg{f.base()};
  const auto rows = run_sweep(f.data.dataset, f.graph, sc, cfg, 3);
  std::stringstream table;
  write_results_table(table, rows);
  std::string line;
  std::getline(table, line);
  EXPECT_EQ(line, "scenario,seed,lambda1,lambda2,tau,MAE,RMSE,WMAPE,iters,seconds,status");
  for (const SweepRow& r : rows) {
    ASSERT_TRUE(std::getline(table, line));
    const auto cells = split(line);
    ASSERT_EQ(cells.size(), 11u) << line;
    EXPECT_EQ(cells[0], r.scenario);
    EXPECT_NEAR(std::stod(cells[5]), r.metrics->mae, 1e-12 * r.metrics->mae);
    EXPECT_NEAR(std::stod(cells[6]), r.metrics->rmse, 1e-12 * r.metrics->rmse);
    EXPECT_NEAR(std::stod(cells[7]), *r.metrics->wmape, 1e-12 * *r.metrics->wmape);
  }

  const auto summary = summarize(rows);
  std::stringstream st;
  write_summary_table(st, summary);
  std::getline(st, line);
  std::getline(st, line);
  const auto cells = split(line);
  ASSERT_EQ(cells.size(), 11u) << line;
  EXPECT_NEAR(std::stod(cells[5]), summary[0].mae_mean, 1e-12 * summary[0].mae_mean);
  EXPECT_NEAR(std::stod(cells[7]), summary[0].rmse_mean, 1e-12 * summary[0].rmse_mean);
}

TEST(Sweep, MetricsRecomputedFromEmittedEstimate) {
  TempDir d;
  SweepFixture f;
  const ScenarioResult sc = apply_scenario(f.data.dataset, MaskScenario{0.2, 0.1, 0.1, 2});
  const SolveResult r = solve(sc.observations, f.graph, f.base());
  const Metrics m = evaluate(r.z_hat, sc.truth, sc.observations.held_out);
  write_value_table(d.path() / "est.csv", r.z_hat, f.data.dataset.location_ids);
  write_edge_table(d.path() / "g.csv", f.data.dataset.edges, f.data.dataset.location_ids);
  const SpeedDataset back = load_dataset(d.path() / "est.csv", d.path() / "g.csv", 8);
  const Metrics again = evaluate(back.values, sc.truth, sc.observations.held_out);
  EXPECT_NEAR(again.mae, m.mae, 1e-12 * m.mae);
  EXPECT_NEAR(again.rmse, m.rmse, 1e-12 * m.rmse);
}

}  // namespace
}  // namespace letc
