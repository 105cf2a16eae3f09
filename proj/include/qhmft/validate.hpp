#pragma once

#include <string>
#include <vector>

namespace qhmft {

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Built-in invariant suite: gate identities, sector closure against the
/// full-space reference, adjoint/finite-difference gradient agreement, and
/// the sector-vs-dense oracle duality. Runs in seconds.
std::vector<ValidationCheck> run_validation_suite();

}  // namespace qhmft
