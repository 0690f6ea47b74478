#include "letc/config_io.hpp"

#include "letc/error.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace letc::cli {
namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) out.reset();
  else out = j.at(key).get<T>();
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ParameterError("unknown " + where + " key '" + key + "'");
  }
}

void apply_solver(const json& j, SolverConfig& c) {
  reject_unknown(j,
                 {"intervals_per_day", "lambda1", "lambda2", "tau", "temporal_operator", "diffusion", "period",
                  "day_weight", "period_weight", "decay", "weekend", "mu_init", "mu_growth", "mu_max",
                  "tolerance", "max_iters", "cg_iters", "krylov", "rank_init", "rank_step", "rank_cap", "power_iters",
                  "oversample", "exact_svt", "init", "track_objective", "seed", "threads"},
                 "config");
  read(j, "intervals_per_day", c.intervals_per_day);
  read(j, "lambda1", c.lambda_spatial);
  read(j, "lambda2", c.lambda_temporal);
  read(j, "tau", c.kernel_size);
  if (j.contains("temporal_operator"))
    c.temporal_operator = parse_temporal_operator(j.at("temporal_operator").get<std::string>());
  if (j.contains("diffusion")) {
    const json& d = j.at("diffusion");
    reject_unknown(d, {"kind", "steps", "alpha", "time", "truncation_order"}, "diffusion");
    if (d.contains("kind")) c.diffusion.kind = parse_diffusion_kind(d.at("kind").get<std::string>());
    read(d, "steps", c.diffusion.steps);
    read(d, "alpha", c.diffusion.alpha);
    read(d, "time", c.diffusion.time);
    read(d, "truncation_order", c.diffusion.truncation_order);
  }
  read(j, "period", c.period);
  read(j, "day_weight", c.day_weight);
  read(j, "period_weight", c.period_weight);
  read_optional(j, "decay", c.decay);
  if (j.contains("weekend")) {
    const json& w = j.at("weekend");
    if (w.is_null()) {
      c.weekend.reset();
    } else {
      reject_unknown(w, {"weight", "days"}, "weekend");
      WeekendPattern p = c.weekend.value_or(WeekendPattern{c.day_weight, 2});
      read(w, "weight", p.weight);
      read(w, "days", p.days);
      c.weekend = p;
    }
  }
  read(j, "mu_init", c.mu_init);
  read(j, "mu_growth", c.mu_growth);
  read(j, "mu_max", c.mu_max);
  read(j, "tolerance", c.tolerance);
  read(j, "max_iters", c.max_iters);
  read(j, "cg_iters", c.cg_iters);
  read(j, "rank_init", c.rank_init);
  read(j, "rank_step", c.rank_step);
  read_optional(j, "rank_cap", c.rank_cap);
  read(j, "power_iters", c.power_iters);
  read(j, "oversample", c.oversample);
  read(j, "exact_svt", c.exact_svt);
  if (j.contains("krylov")) {
    const auto s = j.at("krylov").get<std::string>();
    if (s == "cr") c.krylov = KrylovMethod::conjugate_residual;
    else if (s == "cg") c.krylov = KrylovMethod::conjugate_gradient;
    else throw ParameterError("config: krylov must be 'cr' or 'cg'");
  }
  if (j.contains("init")) {
    const auto s = j.at("init").get<std::string>();
    if (s == "zero") c.init = InitFill::zero;
    else if (s == "column_mean") c.init = InitFill::column_mean;
    else throw ParameterError("config: init must be 'zero' or 'column_mean'");
  }
  read(j, "track_objective", c.track_objective);
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
}

void apply_graph(const json& j, GraphOptions& g) {
  reject_unknown(j, {"sigma", "delta", "degree_mode", "coordinate_weight_threshold"}, "graph");
  read_optional(j, "sigma", g.sigma);
  read(j, "delta", g.delta);
  if (j.contains("degree_mode")) g.degree_mode = parse_degree_mode(j.at("degree_mode").get<std::string>());
  read(j, "coordinate_weight_threshold", g.coordinate_weight_threshold);
}

}  // namespace

RunSettings default_settings() {
  RunSettings s;
  s.solver.threads = 0;
  return s;
}

void apply_json(const json& j, RunSettings& s) {
  if (!j.is_object()) throw ParameterError("config: expected a JSON object");
  try {
    if (j.contains("config") || j.contains("tool")) {
      // Run manifest.
      if (j.contains("config")) apply_solver(j.at("config"), s.solver);
      if (j.contains("graph")) apply_graph(j.at("graph"), s.graph);
      return;
    }
    json solver = j;
    if (j.contains("graph")) {
      apply_graph(j.at("graph"), s.graph);
      solver.erase("graph");
    }
    apply_solver(solver, s.solver);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
}

void load_settings(const std::filesystem::path& path, RunSettings& s) {
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string(), 0, "cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IngestionError(path.string(), 0, std::string("invalid JSON: ") + e.what());
  }
  try {
    apply_json(j, s);
  } catch (const ParameterError& e) {
    throw IngestionError(path.string(), 0, e.what());
  }
}

json to_json(const SolverConfig& c) {
  json j;
  j["intervals_per_day"] = c.intervals_per_day;
  j["lambda1"] = c.lambda_spatial;
  j["lambda2"] = c.lambda_temporal;
  j["tau"] = c.kernel_size;
  j["temporal_operator"] = to_string(c.temporal_operator);
  j["diffusion"] = {{"kind", to_string(c.diffusion.kind)},
                    {"steps", c.diffusion.steps},
                    {"alpha", c.diffusion.alpha},
                    {"time", c.diffusion.time},
                    {"truncation_order", c.diffusion.truncation_order}};
  j["period"] = c.period;
  j["day_weight"] = c.day_weight;
  j["period_weight"] = c.period_weight;
  j["decay"] = c.decay ? json(*c.decay) : json(nullptr);
  j["weekend"] = c.weekend ? json{{"weight", c.weekend->weight}, {"days", c.weekend->days}} : json(nullptr);
  j["mu_init"] = c.mu_init;
  j["mu_growth"] = c.mu_growth;
  j["mu_max"] = c.mu_max;
  j["tolerance"] = c.tolerance;
  j["max_iters"] = c.max_iters;
  j["cg_iters"] = c.cg_iters;
  j["rank_init"] = c.rank_init;
  j["rank_step"] = c.rank_step;
  j["rank_cap"] = c.rank_cap ? json(*c.rank_cap) : json(nullptr);
  j["power_iters"] = c.power_iters;
  j["oversample"] = c.oversample;
  j["exact_svt"] = c.exact_svt;
  j["krylov"] = c.krylov == KrylovMethod::conjugate_gradient ? "cg" : "cr";
  j["init"] = c.init == InitFill::zero ? "zero" : "column_mean";
  j["track_objective"] = c.track_objective;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

json to_json(const GraphOptions& g) {
  return {{"sigma", g.sigma ? json(*g.sigma) : json(nullptr)},
          {"delta", g.delta},
          {"degree_mode", to_string(g.degree_mode)},
          {"coordinate_weight_threshold", g.coordinate_weight_threshold}};
}

json to_json(const MaskScenario& sc) {
  return {{"sm", sc.sm_rate}, {"tm", sc.tm_rate}, {"em", sc.em_rate}, {"seed", sc.seed}, {"label", sc.label()}};
}

json to_json(const Diagnostics& d) {
  json trace = json::array();
  for (const IterationRecord& r : d.trace) {
    trace.push_back({{"iteration", r.iteration},
                     {"change", r.change},
                     {"mu", r.mu},
                     {"rank", r.rank},
                     {"objective", std::isfinite(r.objective) ? json(r.objective) : json(nullptr)},
                     {"cg_iterations", r.cg_iterations},
                     {"cg_residual", r.cg_residual},
                     {"x_seconds", r.x_seconds},
                     {"z_seconds", r.z_seconds}});
  }
  return {{"converged", d.converged},      {"iterations", d.iterations}, {"best_iteration", d.best_iteration},
          {"x_seconds", d.x_seconds},      {"z_seconds", d.z_seconds},   {"total_seconds", d.total_seconds},
          {"trace", std::move(trace)}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IngestionError(path.string(), 0, "cannot open file for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IngestionError(path.string(), 0, "write failed");
}

const char* to_string(TemporalOperator op) {
  switch (op) {
    case TemporalOperator::truncated: return "truncated";
    case TemporalOperator::circulant: return "circulant";
    case TemporalOperator::symmetric_circulant: return "symmetric_circulant";
  }
  return "?";
}

const char* to_string(DiffusionKernel::Kind kind) {
  switch (kind) {
    case DiffusionKernel::Kind::one_step: return "one_step";
    case DiffusionKernel::Kind::high_order: return "high_order";
    case DiffusionKernel::Kind::ppr: return "ppr";
    case DiffusionKernel::Kind::heat: return "heat";
    case DiffusionKernel::Kind::bidirectional: return "bidirectional";
  }
  return "?";
}

const char* to_string(DegreeMode mode) { return mode == DegreeMode::out ? "out" : "in"; }

TemporalOperator parse_temporal_operator(const std::string& s) {
  if (s == "truncated") return TemporalOperator::truncated;
  if (s == "circulant") return TemporalOperator::circulant;
  if (s == "symmetric_circulant") return TemporalOperator::symmetric_circulant;
  throw ParameterError("unknown temporal operator '" + s + "'");
}

DiffusionKernel::Kind parse_diffusion_kind(const std::string& s) {
  if (s == "one_step") return DiffusionKernel::Kind::one_step;
  if (s == "high_order") return DiffusionKernel::Kind::high_order;
  if (s == "ppr") return DiffusionKernel::Kind::ppr;
  if (s == "heat") return DiffusionKernel::Kind::heat;
  if (s == "bidirectional") return DiffusionKernel::Kind::bidirectional;
  throw ParameterError("unknown diffusion kernel '" + s + "'");
}

DegreeMode parse_degree_mode(const std::string& s) {
  if (s == "out") return DegreeMode::out;
  if (s == "in") return DegreeMode::in;
  throw ParameterError("unknown degree mode '" + s + "'");
}

}  // namespace letc::cli
