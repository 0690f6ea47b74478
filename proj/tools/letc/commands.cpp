#include "letc/cli.hpp"

#include "letc/config_io.hpp"
#include "letc/error.hpp"
#include "letc/letc.hpp"
#include "letc/parallel.hpp"
#include "letc/selftest.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace letc::cli {
namespace fs = std::filesystem;

namespace {

// Solver and graph flags; unset flags leave the config-file value alone.
struct SolverFlags {
  std::string config_path;
  std::optional<double> lambda1, lambda2, tolerance, sigma, delta;
  std::optional<std::size_t> tau, max_iters, cg_iters, rank_init, rank_step, power_iters, oversample, period;
  std::optional<std::string> diffusion, degree_mode, temporal_operator, krylov;
  bool exact_svt = false;
  std::optional<unsigned> threads;
};

void add_solver_flags(CLI::App* app, SolverFlags& f, bool grid) {
  app->add_option("--config", f.config_path, "JSON config or run manifest")->check(CLI::ExistingFile);
  if (!grid) {
    app->add_option("--lambda1", f.lambda1, "spatial weight");
    app->add_option("--lambda2", f.lambda2, "temporal weight");
    app->add_option("--tau", f.tau, "temporal kernel size");
    app->add_option("--rank-init", f.rank_init, "initial sketch rank");
  }
  app->add_option("--tolerance", f.tolerance, "stop when the relative change drops below this");
  app->add_option("--max-iters", f.max_iters, "outer iteration limit");
  app->add_option("--cg-iters", f.cg_iters, "Krylov steps per outer iteration");
  app->add_option("--krylov", f.krylov, "cr (conjugate residual) or cg (plain conjugate gradient)")
      ->check(CLI::IsMember({"cr", "cg"}));
  app->add_option("--rank-step", f.rank_step, "sketch rank increment");
  app->add_option("--power-iters", f.power_iters, "power iterations in the sketch");
  app->add_option("--oversample", f.oversample, "sketch oversampling");
  app->add_option("--period", f.period, "days per period of the day graph");
  app->add_option("--diffusion", f.diffusion, "one_step|high_order|ppr|heat|bidirectional");
  app->add_option("--temporal-operator", f.temporal_operator, "truncated|circulant|symmetric_circulant");
  app->add_option("--degree-mode", f.degree_mode, "out|in");
  app->add_option("--sigma", f.sigma, "Gaussian kernel bandwidth (default: distance std)");
  app->add_option("--delta", f.delta, "Gaussian kernel scale");
  app->add_flag("--exact-svt", f.exact_svt, "use the exact t-SVT instead of the sketch");
  app->add_option("--threads", f.threads, "worker threads (default: LETC_THREADS or all cores)");
}

RunSettings resolve(const SolverFlags& f) {
  RunSettings s = default_settings();
  if (!f.config_path.empty()) load_settings(f.config_path, s);
  SolverConfig& c = s.solver;
  if (f.lambda1) c.lambda_spatial = *f.lambda1;
  if (f.lambda2) c.lambda_temporal = *f.lambda2;
  if (f.tau) c.kernel_size = *f.tau;
  if (f.tolerance) c.tolerance = *f.tolerance;
  if (f.max_iters) c.max_iters = *f.max_iters;
  if (f.cg_iters) c.cg_iters = *f.cg_iters;
  if (f.krylov) c.krylov = *f.krylov == "cg" ? KrylovMethod::conjugate_gradient : KrylovMethod::conjugate_residual;
  if (f.rank_init) c.rank_init = *f.rank_init;
  if (f.rank_step) c.rank_step = *f.rank_step;
  if (f.power_iters) c.power_iters = *f.power_iters;
  if (f.oversample) c.oversample = *f.oversample;
  if (f.period) c.period = *f.period;
  if (f.diffusion) c.diffusion.kind = parse_diffusion_kind(*f.diffusion);
  if (f.temporal_operator) c.temporal_operator = parse_temporal_operator(*f.temporal_operator);
  if (f.exact_svt) c.exact_svt = true;
  if (f.threads) c.threads = *f.threads;
  if (c.threads == 0) c.threads = default_thread_count();
  if (f.degree_mode) s.graph.degree_mode = parse_degree_mode(*f.degree_mode);
  if (f.sigma) s.graph.sigma = *f.sigma;
  if (f.delta) s.graph.delta = *f.delta;
  return s;
}

struct InputFlags {
  std::string values, graph;
  std::size_t intervals_per_day = 0;
};

void add_input_flags(CLI::App* app, InputFlags& f) {
  app->add_option("--values", f.values, "value table (header of location ids, empty cell = missing)")->required();
  app->add_option("--graph", f.graph, "edge list (src,dst,distance) or coordinates (id,x,y)")->required();
  app->add_option("-I,--intervals-per-day", f.intervals_per_day, "time points per day")->required();
}

SpeedDataset load_inputs(const InputFlags& f) {
  for (const std::string& p : {f.values, f.graph}) {
    if (!fs::exists(p)) throw IngestionError(p, 0, "no such file");
  }
  return load_dataset(f.values, f.graph, f.intervals_per_day);
}

json manifest(const std::string& command, const RunSettings& s, const InputFlags* in) {
  json m;
  m["tool"] = "letc";
  m["version"] = LETC_VERSION;
  m["command"] = command;
  m["config"] = to_json(s.solver);
  m["graph"] = to_json(s.graph);
  if (in) {
    m["inputs"] = {{"values", fs::absolute(in->values).string()},
                   {"graph", fs::absolute(in->graph).string()},
                   {"intervals_per_day", in->intervals_per_day}};
  }
  return m;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string metric_cell(const std::optional<double>& v) { return v ? fixed(*v) : "-"; }

ObservationSet observe_all(const SpeedDataset& ds) {
  ObservationSet obs;
  obs.observed = ds.observed();
  obs.values = obs.observed.select(ds.values, 0.0);
  return obs;
}

std::vector<std::size_t> parse_size_list(const std::vector<std::string>& items, const char* flag) {
  std::vector<std::size_t> out;
  for (const auto& s : items) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(s, &pos);
      if (pos != s.size() || v < 0) throw std::invalid_argument(s);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ParameterError(std::string(flag) + ": '" + s + "' is not a nonnegative integer");
    }
  }
  return out;
}

MaskScenario parse_scenario(const std::string& text, std::uint64_t seed) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> rates;
  while (std::getline(ss, part, ',')) {
    try {
      rates.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw ParameterError("--scenario: '" + text + "' must be sm,tm,em");
    }
  }
  if (rates.size() != 3) throw ParameterError("--scenario: '" + text + "' must be sm,tm,em");
  MaskScenario sc{rates[0], rates[1], rates[2], seed};
  sc.validate();
  return sc;
}

// ---------------------------------------------------------------- krige

struct KrigeArgs {
  InputFlags in;
  SolverFlags solver;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

int cmd_krige(const KrigeArgs& a, std::ostream& out, std::ostream& err) {
  RunSettings s = resolve(a.solver);
  if (a.seed) s.solver.seed = *a.seed;
  s.solver.intervals_per_day = a.in.intervals_per_day;
  s.solver.validate();
  const SpeedDataset ds = load_inputs(a.in);
  const SpatialGraph graph = build_spatial_graph(ds, s.graph);
  const ObservationSet obs = observe_all(ds);
  const SolveResult res = solve(obs, graph, s.solver);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_value_table(dir / "estimate.csv", res.z_hat, ds.location_ids);
  write_json(dir / "diagnostics.json", to_json(res.diagnostics));
  json m = manifest("krige", s, &a.in);
  m["outputs"] = {{"estimate", "estimate.csv"}, {"diagnostics", "diagnostics.json"}};
  write_json(dir / "manifest.json", m);

  out << "estimate: " << res.z_hat.rows() << " x " << res.z_hat.cols() << " -> " << (dir / "estimate.csv").string()
      << '\n';
  out << "observed entries: " << obs.observed_count() << " of " << obs.values.size() << '\n';
  out << "iterations: " << res.diagnostics.iterations << '\n';
  out << "converged: " << (res.diagnostics.converged ? "yes" : "no") << '\n';
  if (!res.diagnostics.converged) {
    err << "warning: no convergence within " << s.solver.max_iters
        << " iterations; wrote the iterate with the smallest change (iteration "
        << res.diagnostics.best_iteration << ")\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  InputFlags in;
  SolverFlags solver;
  double sm = 0.0, tm = 0.0, em = 0.0;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::string out_dir;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const MaskScenario sc{a.sm, a.tm, a.em, a.seed};
  sc.validate();
  if (a.repeats < 1) throw ParameterError("--repeats must be >= 1");
  RunSettings s = resolve(a.solver);
  s.solver.seed = a.seed;
  s.solver.intervals_per_day = a.in.intervals_per_day;
  s.solver.validate();
  const SpeedDataset ds = load_inputs(a.in);
  const SpatialGraph graph = build_spatial_graph(ds, s.graph);

  const std::vector<MaskScenario> scenarios{sc};
  const std::vector<SolverConfig> configs{s.solver};
  const std::vector<SweepRow> rows = run_sweep(ds, graph, scenarios, configs, a.repeats, s.solver.threads);
  const std::vector<SweepSummary> summary = summarize(rows);

  out << "scenario " << sc.label() << ", " << a.repeats << " repeat(s)\n";
  out << std::left << std::setw(8) << "seed" << std::setw(10) << "held_out" << std::setw(10) << "MAE"
      << std::setw(10) << "RMSE" << std::setw(10) << "WMAPE" << std::setw(7) << "iters"
      << "status\n";
  bool failed = false, stalled = false;
  for (const SweepRow& r : rows) {
    const std::string held = r.metrics ? std::to_string(r.metrics->count) : (r.error.empty() ? "0" : "-");
    out << std::setw(8) << r.seed << std::setw(10) << held << std::setw(10)
        << metric_cell(r.metrics ? std::optional(r.metrics->mae) : std::nullopt) << std::setw(10)
        << metric_cell(r.metrics ? std::optional(r.metrics->rmse) : std::nullopt) << std::setw(10)
        << metric_cell(r.metrics ? r.metrics->wmape : std::nullopt) << std::setw(7) << r.iterations;
    if (!r.error.empty()) {
      out << "error\n";
      err << "error: seed " << r.seed << ": " << r.error << '\n';
      failed = true;
    } else {
      out << (r.converged ? "converged" : "not_converged") << '\n';
      stalled = stalled || !r.converged;
    }
  }
  const SweepSummary& sum = summary.front();
  if (sum.runs == 0) {
    out << "held-out set is empty: metrics absent\n";
  } else {
    out << "mean +/- sd over " << sum.runs << " run(s): MAE " << fixed(sum.mae_mean) << " +/- " << fixed(sum.mae_std)
        << ", RMSE " << fixed(sum.rmse_mean) << " +/- " << fixed(sum.rmse_std);
    if (sum.wmape_mean) out << ", WMAPE " << fixed(*sum.wmape_mean) << " +/- " << fixed(*sum.wmape_std);
    out << '\n';
    out << "LETC(tau=" << s.solver.kernel_size << ") " << sc.label() << " MAE/RMSE " << fixed(sum.mae_mean, 2)
        << "/" << fixed(sum.rmse_mean, 2) << '\n';
  }

  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    std::ofstream table(dir / "results.csv");
    write_results_table(table, rows);
    std::ofstream stable(dir / "summary.csv");
    write_summary_table(stable, summary);
    json m = manifest("evaluate", s, &a.in);
    m["scenario"] = to_json(sc);
    m["repeats"] = a.repeats;
    m["outputs"] = {{"results", "results.csv"}, {"summary", "summary.csv"}};
    write_json(dir / "manifest.json", m);
  }
  if (failed) return kExitInputError;
  return stalled ? kExitNotConverged : kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::size_t locations = 100, intervals_per_day = 48, days = 14, period = 7;
  double noise_sd = 1.0;
  std::uint64_t seed = 1;
  std::string out_dir;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const SyntheticData data = generate_synthetic(a.locations, a.intervals_per_day, a.days, a.period, a.noise_sd, a.seed);
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  const auto& ids = data.dataset.location_ids;
  write_value_table(dir / "values.csv", data.dataset.values, ids);
  write_value_table(dir / "truth.csv", data.truth, ids);
  write_edge_table(dir / "graph.csv", data.dataset.edges, ids);
  {
    std::ofstream xy(dir / "coordinates.csv");
    xy << "id,x,y\n" << std::setprecision(17);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      const auto r = static_cast<Eigen::Index>(j);
      xy << ids[j] << ',' << data.coordinates(r, 0) << ',' << data.coordinates(r, 1) << '\n';
    }
  }
  json m;
  m["tool"] = "letc";
  m["version"] = LETC_VERSION;
  m["command"] = "synth";
  m["synthetic"] = {{"locations", a.locations}, {"intervals_per_day", a.intervals_per_day}, {"days", a.days},
                    {"period", a.period},       {"noise_sd", a.noise_sd},                   {"seed", a.seed}};
  m["outputs"] = {{"values", "values.csv"},
                  {"truth", "truth.csv"},
                  {"graph", "graph.csv"},
                  {"coordinates", "coordinates.csv"}};
  write_json(dir / "manifest.json", m);
  out << "wrote " << a.locations << " locations x " << a.intervals_per_day * a.days << " time points, "
      << data.dataset.edges.size() << " directed edges to " << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  InputFlags in;
  SolverFlags solver;
  std::vector<std::string> scenarios;
  std::vector<double> lambda1, lambda2;
  std::vector<std::string> tau, rank_init;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::string out_dir;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.repeats < 1) throw ParameterError("--repeats must be >= 1");
  std::vector<MaskScenario> scenarios;
  for (const std::string& t : a.scenarios.empty() ? std::vector<std::string>{"0.3,0.2,0.2"} : a.scenarios)
    scenarios.push_back(parse_scenario(t, a.seed));

  RunSettings s = resolve(a.solver);
  s.solver.seed = a.seed;
  s.solver.intervals_per_day = a.in.intervals_per_day;
  const std::vector<double> l1 = a.lambda1.empty() ? std::vector{s.solver.lambda_spatial} : a.lambda1;
  const std::vector<double> l2 = a.lambda2.empty() ? std::vector{s.solver.lambda_temporal} : a.lambda2;
  const std::vector<std::size_t> taus =
      a.tau.empty() ? std::vector{s.solver.kernel_size} : parse_size_list(a.tau, "--tau");
  const std::vector<std::size_t> ranks =
      a.rank_init.empty() ? std::vector{s.solver.rank_init} : parse_size_list(a.rank_init, "--rank-init");
  std::vector<SolverConfig> configs;
  for (double x : l1)
    for (double y : l2)
      for (std::size_t t : taus)
        for (std::size_t k : ranks) {
          SolverConfig c = s.solver;
          c.lambda_spatial = x;
          c.lambda_temporal = y;
          c.kernel_size = t;
          c.rank_init = k;
          c.validate();
          configs.push_back(c);
        }

  const SpeedDataset ds = load_inputs(a.in);
  const SpatialGraph graph = build_spatial_graph(ds, s.graph);
  const std::vector<SweepRow> rows = run_sweep(ds, graph, scenarios, configs, a.repeats, s.solver.threads);
  const std::vector<SweepSummary> summary = summarize(rows);

  out << std::left << std::setw(20) << "scenario" << std::setw(10) << "lambda1" << std::setw(10) << "lambda2"
      << std::setw(5) << "tau" << std::setw(6) << "rank" << std::setw(6) << "runs" << std::setw(18) << "MAE"
      << "RMSE\n";
  for (const SweepSummary& r : summary) {
    out << std::setw(20) << r.scenario << std::setw(10) << r.lambda_spatial << std::setw(10) << r.lambda_temporal
        << std::setw(5) << r.kernel_size << std::setw(6) << configs[r.config_index].rank_init << std::setw(6)
        << r.runs;
    if (r.runs) {
      out << std::setw(18) << (fixed(r.mae_mean) + " +/- " + fixed(r.mae_std))
          << fixed(r.rmse_mean) + " +/- " + fixed(r.rmse_std) << '\n';
    } else {
      out << std::setw(18) << "-" << "-\n";
    }
  }
  bool failed = false;
  for (const SweepRow& r : rows) {
    if (!r.error.empty()) {
      err << "warning: " << r.scenario << " seed " << r.seed << " config " << r.config_index << ": " << r.error
          << '\n';
      failed = true;
    }
  }

  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    std::ofstream table(dir / "results.csv");
    write_results_table(table, rows);
    std::ofstream stable(dir / "summary.csv");
    write_summary_table(stable, summary);
    json m = manifest("sweep", s, &a.in);
    json sc = json::array();
    for (const MaskScenario& x : scenarios) sc.push_back(to_json(x));
    m["scenarios"] = sc;
    m["grid"] = {{"lambda1", l1}, {"lambda2", l2}, {"tau", taus}, {"rank_init", ranks}};
    m["repeats"] = a.repeats;
    m["outputs"] = {{"results", "results.csv"}, {"summary", "summary.csv"}};
    write_json(dir / "manifest.json", m);
  }
  return failed ? kExitInputError : kExitOk;
}

// ------------------------------------------------------------- selftest

struct SelftestArgs {
  bool list = false;
  std::string fault;
};

int cmd_selftest(const SelftestArgs& a, std::ostream& out, std::ostream& err) {
  const auto& checks = selftest_checks();
  if (a.list) {
    for (const auto& c : checks) out << std::left << std::setw(11) << c.name << c.description << '\n';
    return kExitOk;
  }
  if (!a.fault.empty()) {
    const bool known = std::any_of(checks.begin(), checks.end(), [&](const auto& c) { return c.name == a.fault; });
    if (!known) throw ParameterError("--fault: unknown check '" + a.fault + "'");
  }
  std::vector<std::string> failed;
  out << std::left << std::setw(11) << "check" << std::setw(12) << "tolerance" << std::setw(12) << "observed"
      << "status\n";
  for (const auto& c : checks) {
    double e = 0.0;
    std::string status;
    try {
      e = c.run(c.name == a.fault);
      status = e <= c.tolerance ? "PASS" : "FAIL";
    } catch (const std::exception& ex) {
      e = std::numeric_limits<double>::quiet_NaN();
      status = std::string("FAIL (") + ex.what() + ")";
    }
    char tol[32], obs[32];
    std::snprintf(tol, sizeof tol, "%.1e", c.tolerance);
    std::snprintf(obs, sizeof obs, "%.2e", e);
    out << std::setw(11) << c.name << std::setw(12) << tol << std::setw(12) << obs << status << '\n';
    if (status != "PASS") failed.push_back(c.name);
  }
  if (!failed.empty()) {
    for (const auto& name : failed) err << "selftest: check '" << name << "' failed\n";
    return kExitSelftestFailed;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatiotemporal kriging by Laplacian-enhanced low-rank tensor completion", "letc"};
  app.set_version_flag("--version", LETC_VERSION);
  app.require_subcommand(1);

  KrigeArgs krige;
  auto* k = app.add_subcommand("krige", "fill every missing entry of a value table");
  add_input_flags(k, krige.in);
  add_solver_flags(k, krige.solver, false);
  k->add_option("--seed", krige.seed, "sketch seed");
  k->add_option("--out", krige.out_dir, "output directory")->required();

  EvaluateArgs eval;
  auto* e = app.add_subcommand("evaluate", "hide entries by a masking scenario and score the recovery");
  add_input_flags(e, eval.in);
  add_solver_flags(e, eval.solver, false);
  e->add_option("--sm", eval.sm, "fraction of locations hidden");
  e->add_option("--tm", eval.tm, "fraction of time points hidden");
  e->add_option("--em", eval.em, "fraction of remaining entries hidden");
  e->add_option("--seed", eval.seed, "base seed (repeat r masks with seed + r)");
  e->add_option("--repeats", eval.repeats, "number of masking seeds");
  e->add_option("--out", eval.out_dir, "directory for results.csv, summary.csv, manifest.json");

  SynthArgs synth;
  auto* g = app.add_subcommand("synth", "write a synthetic dataset");
  g->add_option("--locations", synth.locations, "number of locations J");
  g->add_option("-I,--intervals-per-day", synth.intervals_per_day, "time points per day");
  g->add_option("--days", synth.days, "number of days K");
  g->add_option("--period", synth.period, "days per period");
  g->add_option("--noise-sd", synth.noise_sd, "Gaussian noise standard deviation");
  g->add_option("--seed", synth.seed, "generator seed");
  g->add_option("--out", synth.out_dir, "output directory")->required();

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "grid of scenarios x hyper-parameters");
  add_input_flags(w, sweep.in);
  add_solver_flags(w, sweep.solver, true);
  w->add_option("--scenario", sweep.scenarios, "sm,tm,em (repeatable; default 0.3,0.2,0.2)");
  w->add_option("--lambda1", sweep.lambda1, "spatial weights")->delimiter(',');
  w->add_option("--lambda2", sweep.lambda2, "temporal weights")->delimiter(',');
  w->add_option("--tau", sweep.tau, "temporal kernel sizes")->delimiter(',');
  w->add_option("--rank-init", sweep.rank_init, "initial sketch ranks")->delimiter(',');
  w->add_option("--seed", sweep.seed, "base seed");
  w->add_option("--repeats", sweep.repeats, "masking seeds per cell");
  w->add_option("--out", sweep.out_dir, "directory for results.csv, summary.csv, manifest.json");

  SelftestArgs self;
  auto* t = app.add_subcommand("selftest", "compare library routines against dense reference solutions");
  t->add_flag("--list", self.list, "print the checks without running them");
  t->add_option("--fault", self.fault, "corrupt one check's output (tests the tester)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*k) return cmd_krige(krige, out, err);
    if (*e) return cmd_evaluate(eval, out, err);
    if (*g) return cmd_synth(synth, out);
    if (*w) return cmd_sweep(sweep, out, err);
    if (*t) return cmd_selftest(self, out, err);
  } catch (const IngestionError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitInputError;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitInputError;
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace letc::cli
