#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace letc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitSelftestFailed = 3;

/// Runs the `letc` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace letc::cli
