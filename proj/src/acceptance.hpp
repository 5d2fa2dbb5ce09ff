#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qot {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the full verification suite: every quantitative claim the
/// simulator is expected to reproduce, each checked at its pinned band
/// or tolerance. Deterministic given the master seed.
std::vector<CriterionResult> run_acceptance(std::uint64_t master_seed = 42);

/// One line per criterion; returns the number of failures.
int print_acceptance(const std::vector<CriterionResult> &results);

} // namespace qot
