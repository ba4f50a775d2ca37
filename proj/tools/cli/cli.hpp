#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bisched::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

// Parses "seed=a..b" (inclusive). Throws Error(ConfigInvalid) on malformed input.
std::pair<std::uint64_t, std::uint64_t> parse_sweep(std::string_view spec);

// Entry point behind the executable. `args` excludes the program name.
//   run    --config <path> [--seed N] [--scheduler bi|fifo|ampdu-greedy]
//          [--duration-ms N] [--format csv|json] [--out <path>] [--compare]
//          [--sweep seed=a..b] [--jobs N]
//   golden --out-dir <dir>
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bisched::cli
