#pragma once

#include <string>
#include <vector>

namespace coopq {

// One cross-module invariant check: measured value against its tolerance.
struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string note;
};

// Runs every invariant listed across the modules (branch invariance,
// algebraic identities, integrator agreement, determinism, oracle checks).
std::vector<CheckResult> run_validate_checks();

}  // namespace coopq
