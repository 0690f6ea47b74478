#pragma once

#include <functional>
#include <string>
#include <vector>

namespace letc::cli {

/// One embedded oracle comparison. `run` returns the observed error; with
/// `fault` set it corrupts the library output first, so the check must fail.
struct SelftestCheck {
  std::string name;
  std::string description;
  double tolerance = 0.0;
  std::function<double(bool fault)> run;
};

const std::vector<SelftestCheck>& selftest_checks();

}  // namespace letc::cli
