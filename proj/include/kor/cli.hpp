#pragma once

#include <iosfwd>

namespace kor {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNoRoute = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// Entry point of the `kor` tool: preprocess, query, oracle, gen and bench
/// subcommands. Results go to `out` as one JSON object per line.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kor
