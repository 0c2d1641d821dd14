#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixserve::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;  // infeasible plan, failed threshold
inline constexpr int kExitUsage = 2;   // bad arguments, unreadable input

// Entry point behind the `mixserve` binary. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mixserve::cli
