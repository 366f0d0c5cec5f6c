#pragma once

#include <string>
#include <vector>

namespace bair {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

enum class ValidationSuite { Unit, Properties, Statistical };

// Named invariant checks, grouped by cost: closed-form value checks,
// deterministic structural properties over seeded runs, and Monte-Carlo
// checks with statistical thresholds.
std::vector<CheckResult> run_validation_suite(ValidationSuite suite);

}  // namespace bair
