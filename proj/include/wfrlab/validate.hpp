#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wfr {

struct CheckResult {
    std::string suite;
    std::string name;
    double residual = 0.0;   ///< measured quantity compared against tolerance
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

std::vector<std::string> suite_names();

/// Runs one suite, or every suite when `suite` is empty.
/// Throws ConfigError for an unknown suite name.
std::vector<CheckResult> run_suites(const std::string& suite, std::uint64_t seed = 42);

/// Checks known to fail because the stated formula does not bound the exact value.
/// See README, "Known discrepancy".
bool is_known_discrepancy(const CheckResult& c);

std::string validate_text(const std::vector<CheckResult>& checks, std::uint64_t seed);
std::string validate_json(const std::vector<CheckResult>& checks, std::uint64_t seed);

}  // namespace wfr
