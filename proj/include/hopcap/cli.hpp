#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hopcap {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

// Subcommands: gen | entropy | simulate | estimate | classify | report | validate.
// JSON results go to out; diagnostics and usage to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hopcap
