#pragma once

#include "scalar.hpp"
#include <string>
#include <vector>

namespace g2flow::refcheck {

enum class Status { Pass, Discrepancy, Fail };

/// Outcome of checking one engine-derived quantity against the transcribed
/// reference formula it should reproduce. Discrepancy means the engine is
/// internally consistent but disagrees with the reference as printed.
struct CheckResult {
    Status status = Status::Fail;
    std::string id;
    std::string title;
    std::string engine;    // engine-derived expression
    std::string reference; // reference expression as transcribed
    std::string note;
};

struct Constants {
    Rat c0;       // |Rm|^2 * h^8 / f^4 on the contact family (constant)
    Rat c0_prime; // |∇T|^2 * h^8 / f^4
};

Constants computed_constants();

std::vector<CheckResult> run_reference_checks();

bool any_fail(const std::vector<CheckResult>& results);

/// Fixed-width PASS/DISCREPANCY/FAIL table for the verify command.
std::string render_table(const std::vector<CheckResult>& results);

/// Markdown discrepancy ledger with both expressions side by side, plus the
/// computed constants.
std::string render_report(const std::vector<CheckResult>& results, const Constants& constants);

} // namespace g2flow::refcheck
