#pragma once

#include <iosfwd>

namespace hpboost {

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInternal = 3;

/// Entry point of the hpboost tool. Subcommands: params, run, oracle-check,
/// jss, counterexample. Returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hpboost
