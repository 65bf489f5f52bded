#pragma once

#include <iosfwd>

#include "mati/cli/config.hpp"

namespace mati::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;

// Executes one command; summaries go to `out`, diagnostics to `err`. Never throws.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace mati::cli
