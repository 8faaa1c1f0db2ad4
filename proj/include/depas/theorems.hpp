#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace depas {

struct CheckResult {
    std::string name;
    bool pass = false;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    std::string note;
};

// Analytic and Monte-Carlo verification of the scaling-probability formulas:
//  - removal identity: sum of removal indicators weighted by node capacity
//    equals the optimal capacity to remove, for randomized node sets;
//  - addition identity: the same for the addition indicator, with arbitrary
//    per-node new-node capacities;
//  - simulated single cycles whose sample mean removed/added capacity must
//    land within 3 standard errors of the optimum;
//  - the legacy capacity-blind indicator, which matches the optimum only when
//    the potential added capacities sum to the system capacity and
//    over-provisions by 2x when they sum to twice that.
std::vector<CheckResult> run_theorem_checks(std::uint64_t seed);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace depas
