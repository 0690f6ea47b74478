#include "letc/cli.hpp"
#include "letc/letc.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace letc {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("letc_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    // 12 locations, 6 points per day, 4 days, with a quarter of the cells blank.
    const SyntheticData s = generate_synthetic(12, 6, 4, 2, 0.5, 3);
    Matrix v = s.dataset.values;
    std::mt19937_64 rng(1);
    std::bernoulli_distribution blank(0.25);
    for (Eigen::Index q = 0; q < v.size(); ++q)
      if (blank(rng)) v(q) = std::numeric_limits<double>::quiet_NaN();
    write_value_table(values(), v, s.dataset.location_ids);
    write_edge_table(graph(), s.dataset.edges, s.dataset.location_ids);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path values() const { return dir_ / "values.csv"; }
  fs::path graph() const { return dir_ / "graph.csv"; }
  std::vector<std::string> inputs() const {
    return {"--values", values().string(), "--graph", graph().string(), "-I", "6", "--period", "2"};
  }
  std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) const {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  }

  fs::path dir_;
};

TEST_F(CliTest, SelftestPasses) {
  const Result r = run({"selftest"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find("svt"), std::string::npos);
}

TEST_F(CliTest, SelftestListDoesNotRun) {
  const Result r = run({"selftest", "--list"});
  EXPECT_EQ(r.code, cli::kExitOk);
  for (const char* name : {"transform", "tnn", "svt", "rsvt", "cg", "smooth", "adjacency", "circulant", "remark"})
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  EXPECT_EQ(r.out.find("PASS"), std::string::npos);
}

TEST_F(CliTest, SelftestFaultNamesTheCheck) {
  const Result r = run({"selftest", "--fault", "svt"});
  EXPECT_EQ(r.code, cli::kExitSelftestFailed);
  EXPECT_NE(r.err.find("'svt'"), std::string::npos) << r.err;
  EXPECT_EQ(run({"selftest", "--fault", "nope"}).code, cli::kExitInputError);
}

TEST_F(CliTest, KrigeWritesFullEstimate) {
  const Result r = run(with({"krige"}, with(inputs(), {"--out", (dir_ / "k").string()})));
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const SpeedDataset est = load_dataset(dir_ / "k" / "estimate.csv", graph(), 6);
  EXPECT_EQ(est.values.rows(), 24);
  EXPECT_EQ(est.values.cols(), 12);
  EXPECT_TRUE(est.values.allFinite());
  EXPECT_TRUE(fs::exists(dir_ / "k" / "diagnostics.json"));
  EXPECT_TRUE(fs::exists(dir_ / "k" / "manifest.json"));
}

TEST_F(CliTest, MissingFileIsAnInputError) {
  const std::string absent = (dir_ / "absent.csv").string();
  const Result r = run({"krige", "--values", absent, "--graph", graph().string(), "-I", "6", "--out",
                        (dir_ / "k").string()});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("absent.csv"), std::string::npos) << r.err;
}

TEST_F(CliTest, ForcedNonConvergenceStillWritesResults) {
  const Result r = run(with({"krige"}, with(inputs(), {"--max-iters", "1", "--out", (dir_ / "k").string()})));
  EXPECT_EQ(r.code, cli::kExitNotConverged);
  EXPECT_TRUE(fs::exists(dir_ / "k" / "estimate.csv"));
  const auto diag = nlohmann::json::parse(slurp(dir_ / "k" / "diagnostics.json"));
  EXPECT_FALSE(diag.at("converged").get<bool>());
}

TEST_F(CliTest, ManifestReproducesTheEstimate) {
  ASSERT_EQ(run(with({"krige"}, with(inputs(), {"--lambda1", "0.05", "--seed", "7", "--out", (dir_ / "a").string()})))
                .code,
            cli::kExitOk);
  const std::string manifest = (dir_ / "a" / "manifest.json").string();
  ASSERT_EQ(run(with({"krige", "--config", manifest}, with(inputs(), {"--seed", "7", "--out", (dir_ / "b").string()})))
                .code,
            cli::kExitOk);
  EXPECT_EQ(slurp(dir_ / "a" / "estimate.csv"), slurp(dir_ / "b" / "estimate.csv"));
}

TEST_F(CliTest, ConfigPrecedence) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"lambda1": 0.5, "lambda2": 0.25})";
  auto lambda = [&](const std::vector<std::string>& extra, const char* key) {
    const fs::path out = dir_ / "p";
    fs::remove_all(out);
    const Result r = run(with(with({"krige"}, inputs()), with(extra, {"--max-iters", "2", "--out", out.string()})));
    EXPECT_NE(r.code, cli::kExitInputError) << r.err;
    return nlohmann::json::parse(slurp(out / "manifest.json")).at("config").at(key).get<double>();
  };
  EXPECT_EQ(lambda({}, "lambda1"), 0.01);
  EXPECT_EQ(lambda({"--config", cfg.string()}, "lambda1"), 0.5);
  EXPECT_EQ(lambda({"--config", cfg.string(), "--lambda1", "0.2"}, "lambda1"), 0.2);
  EXPECT_EQ(lambda({"--config", cfg.string(), "--lambda1", "0.2"}, "lambda2"), 0.25);
}

TEST_F(CliTest, UnknownConfigKeyIsRejected) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"lambda_one": 0.5})";
  const Result r = run(with(with({"krige"}, inputs()), {"--config", cfg.string(), "--out", (dir_ / "k").string()}));
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("lambda_one"), std::string::npos) << r.err;
}

TEST_F(CliTest, EvaluateWithoutMaskingReportsEmptyHeldOutSet) {
  const Result r = run(with({"evaluate"}, with(inputs(), {"--sm", "0", "--tm", "0", "--em", "0"})));
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("metrics absent"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("MAE/RMSE"), std::string::npos);
}

TEST_F(CliTest, EvaluateRepeatsGiveRowsAndSummary) {
  const fs::path out = dir_ / "e";
  const auto args = with({"evaluate"}, with(inputs(), {"--sm", "0.25", "--em", "0.2", "--repeats", "5", "--seed", "3"}));
  const Result r = run(with(args, {"--out", out.string()}));
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::istringstream lines(slurp(out / "results.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_NE(r.out.find("mean +/- sd over 5 run(s)"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(out / "summary.csv"));
  // Same seed, same report.
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST_F(CliTest, InvalidRatesAreInputErrors) {
  EXPECT_EQ(run(with({"evaluate"}, with(inputs(), {"--sm", "1.5"}))).code, cli::kExitInputError);
  EXPECT_EQ(run(with({"evaluate"}, with(inputs(), {"--em", "-0.1"}))).code, cli::kExitInputError);
}

TEST_F(CliTest, SweepWritesOneRowPerCell) {
  const fs::path out = dir_ / "w";
  const Result r = run(with({"sweep"}, with(inputs(), {"--scenario", "0.25,0,0.1", "--scenario", "0,0.2,0.1",
                                                        "--lambda1", "0.01,0.1", "--max-iters", "20", "--out",
                                                        out.string()})));
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::istringstream lines(slurp(out / "results.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST_F(CliTest, SynthWritesDataset) {
  const fs::path out = dir_ / "s";
  const Result r = run({"synth", "--locations", "8", "-I", "4", "--days", "3", "--period", "3", "--out", out.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const SpeedDataset ds = load_dataset(out / "values.csv", out / "graph.csv", 4);
  EXPECT_EQ(ds.values.rows(), 12);
  EXPECT_EQ(ds.values.cols(), 8);
}

TEST_F(CliTest, BadUsageIsAnInputError) {
  EXPECT_EQ(run({"krige"}).code, cli::kExitInputError);
  EXPECT_EQ(run({"no-such-command"}).code, cli::kExitInputError);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

}  // namespace
}  // namespace letc
