#pragma once

#include <iosfwd>

namespace bbspline {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `bbspline` tool. Results go to `out` unless --output is
// given; diagnostics and usage text go to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace bbspline
