#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rigidlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBudget = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitWindowHit = 3;

// Runs one subcommand. `args` excludes the program name. Records go to
// --out when given, otherwise to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rigidlab
