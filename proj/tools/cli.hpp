#pragma once

#include <string>
#include <vector>

namespace wmark::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCapacity = 3;
inline constexpr int kExitFormat = 4;
inline constexpr int kExitExtraction = 5;

/// Run the command line given the argv tail (no program name).
/// Never throws; failures map to the exit-code table above, with a
/// human-readable message on stderr. No output file is left behind on a
/// nonzero exit.
int run(std::vector<std::string> args);

}  // namespace wmark::cli
