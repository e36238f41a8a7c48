#pragma once

#include <iosfwd>

namespace cascade_kde {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Subcommands: generate, corrupt, restore, metrics, bench, scaling.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cascade_kde
