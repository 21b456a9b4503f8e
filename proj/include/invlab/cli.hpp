// Command-line entry point: simulate, bin, analyze, fit, report, verify.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace invlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. `args` excludes the program name. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace invlab
