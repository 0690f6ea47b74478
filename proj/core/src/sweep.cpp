#include "letc/error.hpp"
#include "letc/harness.hpp"
#include "letc/parallel.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

namespace letc {
namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SpeedDataset& ds, const SpatialGraph& graph,
                                std::span<const MaskScenario> scenarios,
                                std::span<const SolverConfig> configs, std::size_t repeats,
                                unsigned threads) {
  if (repeats == 0) throw ParameterError("run_sweep: repeats must be >= 1");
  for (const MaskScenario& sc : scenarios) sc.validate();

  struct Prepared {
    SolverConfig config;
    std::optional<LetcOperators> ops;
    std::string error;
  };
  std::vector<Prepared> prepared;
  for (const SolverConfig& c : configs) {
    Prepared p{c, std::nullopt, {}};
    p.config.intervals_per_day = ds.intervals_per_day;
    if (threads != 1) p.config.threads = 1;
    try {
      p.config.validate();
      p.ops = build_operators(ds.intervals_per_day, ds.days, graph, p.config);
    } catch (const Error& e) {
      p.error = e.what();
    }
    prepared.push_back(std::move(p));
  }

  const std::size_t per_scenario = configs.size() * repeats;
  std::vector<SweepRow> rows(scenarios.size() * per_scenario);
  parallel_for(rows.size(), threads, [&](std::size_t cell) {
    const std::size_t s = cell / per_scenario;
    const std::size_t c = (cell % per_scenario) / repeats;
    const std::size_t r = cell % repeats;
    const Prepared& p = prepared[c];
    SweepRow& row = rows[cell];
    MaskScenario sc = scenarios[s];
    sc.seed += r;
    row.scenario = sc.label();
    row.seed = sc.seed;
    row.lambda_spatial = p.config.lambda_spatial;
    row.lambda_temporal = p.config.lambda_temporal;
    row.kernel_size = p.config.kernel_size;
    row.config_index = c;
    if (!p.ops) {
      row.error = p.error;
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const ScenarioResult masked = apply_scenario(ds, sc);
      const SolveResult res = solve(masked.observations, *p.ops, p.config);
      row.iterations = res.diagnostics.iterations;
      row.converged = res.diagnostics.converged;
      if (masked.observations.held_out_count() > 0)
        row.metrics = evaluate(res.z_hat, masked.truth, masked.observations.held_out);
    } catch (const Error& e) {
      row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  return rows;
}

std::vector<SweepSummary> summarize(std::span<const SweepRow> rows) {
  std::map<std::pair<std::string, std::size_t>, std::vector<const SweepRow*>> groups;
  std::vector<std::pair<std::string, std::size_t>> order;
  for (const SweepRow& r : rows) {
    auto key = std::make_pair(r.scenario, r.config_index);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<SweepSummary> out;
  for (const auto& key : order) {
    const auto& group = groups[key];
    SweepSummary s;
    s.scenario = key.first;
    s.config_index = key.second;
    s.lambda_spatial = group.front()->lambda_spatial;
    s.lambda_temporal = group.front()->lambda_temporal;
    s.kernel_size = group.front()->kernel_size;
    std::vector<double> mae, rmse, wmape;
    bool all_wmape = true;
    for (const SweepRow* r : group) {
      if (!r->error.empty() || !r->metrics) continue;
      mae.push_back(r->metrics->mae);
      rmse.push_back(r->metrics->rmse);
      if (r->metrics->wmape) wmape.push_back(*r->metrics->wmape);
      else all_wmape = false;
    }
    s.runs = mae.size();
    const Moments m = moments(mae), e = moments(rmse);
    s.mae_mean = m.mean, s.mae_std = m.sd;
    s.rmse_mean = e.mean, s.rmse_std = e.sd;
    if (all_wmape && !wmape.empty()) {
      const Moments w = moments(wmape);
      s.wmape_mean = w.mean;
      s.wmape_std = w.sd;
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Metrics are printed with enough digits to read back bit-exactly.
constexpr int kDigits = std::numeric_limits<double>::max_digits10;

void write_results_table(std::ostream& out, std::span<const SweepRow> rows) {
  out << "scenario,seed,lambda1,lambda2,tau,MAE,RMSE,WMAPE,iters,seconds,status\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  for (const SweepRow& r : rows) {
    out << std::defaultfloat << std::setprecision(kDigits) << r.scenario << ',' << r.seed << ','
        << r.lambda_spatial << ',' << r.lambda_temporal << ',' << r.kernel_size << ',';
    if (r.metrics) {
      out << r.metrics->mae << ',' << r.metrics->rmse << ',';
      if (r.metrics->wmape) out << *r.metrics->wmape;
    } else {
      out << ",,";
    }
    out << ',' << r.iterations << ',' << std::fixed << std::setprecision(3) << r.seconds << ',';
    if (!r.error.empty()) {
      std::string msg = r.error;
      for (char& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      out << "error: " << msg;
    } else {
      out << (r.converged ? "converged" : "not_converged");
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void write_summary_table(std::ostream& out, std::span<const SweepSummary> rows) {
  out << "scenario,lambda1,lambda2,tau,runs,MAE,MAE_sd,RMSE,RMSE_sd,WMAPE,WMAPE_sd\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  for (const SweepSummary& s : rows) {
    out << std::defaultfloat << std::setprecision(kDigits) << s.scenario << ',' << s.lambda_spatial
        << ',' << s.lambda_temporal << ',' << s.kernel_size << ',' << s.runs << ',';
    if (s.runs) out << s.mae_mean << ',' << s.mae_std << ',' << s.rmse_mean << ',' << s.rmse_std << ',';
    else out << ",,,,";
    if (s.wmape_mean) out << *s.wmape_mean << ',' << *s.wmape_std;
    else out << ',';
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace letc
