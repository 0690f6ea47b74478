#include "letc/error.hpp"
#include "letc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace letc {
namespace {

std::string percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", rate * 100.0);
  return buf;
}

std::vector<std::size_t> pick(std::size_t count, std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::string MaskScenario::label() const {
  return "SM" + percent(sm_rate) + "-TM" + percent(tm_rate) + "-EM" + percent(em_rate);
}

void MaskScenario::validate() const {
  for (double r : {sm_rate, tm_rate, em_rate}) {
    if (!(r >= 0.0 && r < 1.0))
      throw ParameterError("scenario " + label() + ": missing rates must lie in [0, 1)");
  }
}

std::size_t masked_count(double rate, std::size_t count) {
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(count) + 0.5));
}

ScenarioResult apply_scenario(const SpeedDataset& ds, const MaskScenario& sc) {
  sc.validate();
  ds.validate();
  const auto rows = static_cast<std::size_t>(ds.values.rows());
  const auto cols = ds.locations();
  std::mt19937_64 rng(sc.seed);

  ScenarioResult out;
  out.truth = ds.values;
  const Mask originally = ds.observed();
  Mask hidden = Mask::Constant(ds.values.rows(), ds.values.cols(), false);

  out.hidden_locations = pick(masked_count(sc.sm_rate, cols), cols, rng);
  for (std::size_t j : out.hidden_locations) hidden.col(static_cast<Eigen::Index>(j)).setConstant(true);
  out.hidden_intervals = pick(masked_count(sc.tm_rate, rows), rows, rng);
  for (std::size_t i : out.hidden_intervals) hidden.row(static_cast<Eigen::Index>(i)).setConstant(true);

  std::vector<Eigen::Index> remaining;
  for (Eigen::Index k = 0; k < hidden.size(); ++k)
    if (!hidden(k) && originally(k)) remaining.push_back(k);
  const std::size_t elements = masked_count(sc.em_rate, remaining.size());
  std::shuffle(remaining.begin(), remaining.end(), rng);
  for (std::size_t n = 0; n < elements; ++n) hidden(remaining[n]) = true;
  out.hidden_elements = elements;

  ObservationSet& obs = out.observations;
  obs.observed = originally && !hidden;
  obs.held_out = originally && hidden;
  if (obs.observed_count() == 0)
    throw ParameterError("scenario " + sc.label() + " leaves no observed entries");
  obs.values = ds.values;
  for (Eigen::Index k = 0; k < obs.values.size(); ++k)
    if (!obs.observed(k)) obs.values(k) = 0.0;
  return out;
}

}  // namespace letc
