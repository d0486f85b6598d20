#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crashdet::cli {

/// Exit codes of the `crashdet` tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

/// Runs one invocation. `args` excludes the program name, e.g.
/// {"simulate", "--seed", "7"}. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crashdet::cli
