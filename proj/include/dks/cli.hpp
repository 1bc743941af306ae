#pragma once

#include <iosfwd>

namespace dks {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

//! Entry point of the `dks` tool. Subcommands: estimate, cv, simulate, risk,
//! kernel-info, reproduce. Human-readable tables go to `out`, diagnostics to
//! `err`. Returns 0 on success, 1 on usage errors, 2 on runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dks
