#pragma once

#include <ostream>

namespace ghost {

/// Runs the fast oracle checks (solver optimality, bucket re-summation,
/// determinism, coherence arithmetic) and prints one PASS/FAIL line each.
/// Returns true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace ghost
