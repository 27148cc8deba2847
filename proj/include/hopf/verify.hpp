#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hopf {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast invariant suite (closed forms, integrator identities, noise, contraction); a few seconds.
std::vector<CheckResult> run_verify_suite();

/// Prints one row per check and a summary line; returns true when every check passed.
bool print_verify_table(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace hopf
