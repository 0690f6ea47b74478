#pragma once

#include "letc/harness.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace letc::cli {

using nlohmann::json;

/// Everything a run needs besides its inputs.
struct RunSettings {
  SolverConfig solver;
  GraphOptions graph;
};

/// Built-in defaults as used by the command line (threads = machine parallelism).
RunSettings default_settings();

/// Overlays the keys present in `j` onto `s`. Unknown keys are rejected.
/// A run manifest is accepted too: its "config" and "graph" members are read.
void apply_json(const json& j, RunSettings& s);
void load_settings(const std::filesystem::path& path, RunSettings& s);

json to_json(const SolverConfig& c);
json to_json(const GraphOptions& g);
json to_json(const MaskScenario& sc);
json to_json(const Diagnostics& d);

void write_json(const std::filesystem::path& path, const json& j);

const char* to_string(TemporalOperator op);
const char* to_string(DiffusionKernel::Kind kind);
const char* to_string(DegreeMode mode);
TemporalOperator parse_temporal_operator(const std::string& s);
DiffusionKernel::Kind parse_diffusion_kind(const std::string& s);
DegreeMode parse_degree_mode(const std::string& s);

}  // namespace letc::cli
