#pragma once

#include <ostream>

namespace nisim {

/// Runs the library's invariant suite (preparation fidelities, propagator
/// identities, count-rate laws, proportionality, witness ideals, reduction,
/// calibration, visibility scaling), printing one line per check.
/// Returns true when every check passes.
bool run_self_checks(std::ostream& out);

}  // namespace nisim
