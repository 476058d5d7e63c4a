#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matteforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidArgs = 2;
inline constexpr int kExitPipelineError = 3;

/// Runs `matteforge <subcommand> ...` with `args` excluding the program name.
/// Subcommands: segment, bench, fixtures. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace matteforge::cli
