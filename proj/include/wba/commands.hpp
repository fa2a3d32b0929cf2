#pragma once

// Runs a validated RunConfig and writes its artifacts into config.output:
// a CSV, a gnuplot script that plots it, and (for scans) a JSON summary.
// A one-line summary goes to `out`; diagnostics go to `err`.

#include "wba/config.hpp"

#include <iosfwd>
#include <string>

namespace wba::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitIo = 3 };

inline constexpr char const* kWorkersEnv = "WBA_WORKERS";

/// requested > 0 wins; then WBA_WORKERS; then the hardware thread count.
unsigned resolve_workers(unsigned requested);

/// Start point of the critical-epsilon search in (psi, theta, zeta) order,
/// near the hyperbolic point of the (4,1) island.
State default_critical_x0();

struct DispatchOptions {
    bool quiet = false;
};

int dispatch(RunConfig const& config, std::ostream& out, std::ostream& err, DispatchOptions const& options = {});

}  // namespace wba::cli
