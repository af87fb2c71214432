// Invariant suite behind `verify`.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fran::verify {

struct CheckResult {
    std::string module;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs every check under the currently active mutation.
std::vector<CheckResult> run_all();

/// Prints one line per check and a summary; returns the number of failures.
int report(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace fran::verify
