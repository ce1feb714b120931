#pragma once

#include <iosfwd>

namespace tiedpools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNumerical = 2;

// Subcommands fit, pools and simulate. Reports go to --out or `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tiedpools
