#include "depas/theorems.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "depas/engine.hpp"
#include "depas/scaler.hpp"

namespace depas {

namespace {

constexpr double kDesiredLoad = 0.7;
constexpr double kLoadVariation = 0.1;

struct Sample {
    double mean = 0.0;
    double std_error = 0.0;
};

Sample mean_and_std_error(const std::vector<double>& values) {
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (const double v : values) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(values.size());
    return Sample{mean, std::sqrt(var / static_cast<double>(values.size()))};
}

// Worst relative identity error over randomized node sets for the removal
// indicator: sum(pi * C_i) vs ((L0 - L) / L0) * C.
CheckResult removal_identity(RngStream& rng) {
    CheckResult result;
    result.name = "removal-identity";
    result.tolerance = 1e-9;
    double worst = 0.0;
    for (int set = 0; set < 100; ++set) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 10000.0);
        const double load = rng.uniform() * (kDesiredLoad - kLoadVariation);
        double total_capacity = 0.0;
        double expected_removed = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double capacity = 1.0 + std::floor(rng.uniform() * 10.0);
            total_capacity += capacity;
            expected_removed += removal_prob_indicator(load, kDesiredLoad) * capacity;
        }
        const double optimal = (kDesiredLoad - load) / kDesiredLoad * total_capacity;
        worst = std::max(worst, std::abs(expected_removed - optimal) / optimal);
    }
    result.expected = 0.0;
    result.observed = worst;
    result.pass = worst <= result.tolerance;
    result.note = "worst relative error over 100 randomized node sets";
    return result;
}

// Same identity for the addition indicator with arbitrary per-node new-node
// capacities: sum(pi_i * C_add_i) vs ((L - L0) / L0) * C.
CheckResult addition_identity(RngStream& rng) {
    CheckResult result;
    result.name = "addition-identity";
    result.tolerance = 1e-9;
    double worst = 0.0;
    for (int set = 0; set < 100; ++set) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 10000.0);
        const double load = kDesiredLoad + kLoadVariation + rng.uniform() * 2.0;
        double total_capacity = 0.0;
        double expected_added = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double capacity = 1.0 + std::floor(rng.uniform() * 10.0);
            const double add_capacity = 0.5 + rng.uniform() * 7.5;
            total_capacity += capacity;
            expected_added +=
                addition_prob_indicator(load, kDesiredLoad, capacity, add_capacity) * add_capacity;
        }
        const double optimal = (load - kDesiredLoad) / kDesiredLoad * total_capacity;
        worst = std::max(worst, std::abs(expected_added - optimal) / optimal);
    }
    result.expected = 0.0;
    result.observed = worst;
    result.pass = worst <= result.tolerance;
    result.note = "worst relative error over 100 randomized node sets, arbitrary C_add";
    return result;
}

std::vector<double> mixed_capacities(std::size_t n) {
    std::vector<double> capacities(n);
    for (std::size_t i = 0; i < n; ++i) {
        capacities[i] = (i % 2 == 0) ? 1.0 : 5.0;
    }
    return capacities;
}

// Simulated removal cycles: 1000 nodes of capacities {1,5} sharing an exact
// estimate below the low threshold; mean removed capacity over 10^4 cycles
// must land within 3 standard errors of the optimum.
CheckResult removal_monte_carlo(RngStream& rng) {
    const std::size_t n = 1000;
    const int trials = 10000;
    const double load = 0.35;
    const ScalerConfig config{60.0, kDesiredLoad, kLoadVariation, true};
    const auto capacities = mixed_capacities(n);
    double total_capacity = 0.0;
    for (const double c : capacities) {
        total_capacity += c;
    }

    std::vector<double> removed_per_trial(trials);
    for (int t = 0; t < trials; ++t) {
        double removed = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto decision = decide(load, config, capacities[i], 1.0, rng);
            if (decision.kind == ScalingDecision::Kind::RemoveSelf) {
                removed += capacities[i];
            }
        }
        removed_per_trial[t] = removed;
    }

    const Sample sample = mean_and_std_error(removed_per_trial);
    CheckResult result;
    result.name = "removal-monte-carlo";
    result.expected = (kDesiredLoad - load) / kDesiredLoad * total_capacity;
    result.observed = sample.mean;
    result.tolerance = 3.0 * sample.std_error;
    result.pass = std::abs(sample.mean - result.expected) <= result.tolerance;
    result.note = "mean removed capacity over 10^4 cycles, n=1000, C in {1,5}";
    return result;
}

// Simulated addition cycles: shared exact L = 1.4, per-node C_add alternating
// {1,5} opposite the node's own capacity.
CheckResult addition_monte_carlo(RngStream& rng) {
    const std::size_t n = 1000;
    const int trials = 10000;
    const double load = 1.4;
    const ScalerConfig config{60.0, kDesiredLoad, kLoadVariation, true};
    const auto capacities = mixed_capacities(n);
    double total_capacity = 0.0;
    for (const double c : capacities) {
        total_capacity += c;
    }

    std::vector<double> added_per_trial(trials);
    for (int t = 0; t < trials; ++t) {
        double added = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double add_capacity = (i % 2 == 0) ? 5.0 : 1.0;
            const auto decision = decide(load, config, capacities[i], add_capacity, rng);
            if (decision.kind == ScalingDecision::Kind::Add) {
                added += static_cast<double>(decision.add_count) * decision.add_capacity;
            }
        }
        added_per_trial[t] = added;
    }

    const Sample sample = mean_and_std_error(added_per_trial);
    CheckResult result;
    result.name = "addition-monte-carlo";
    result.expected = (load - kDesiredLoad) / kDesiredLoad * total_capacity;
    result.observed = sample.mean;
    result.tolerance = 3.0 * sample.std_error;
    result.pass = std::abs(sample.mean - result.expected) <= result.tolerance;
    result.note = "mean added capacity over 10^4 cycles, n=1000, C_add alternating {1,5}";
    return result;
}

// Legacy capacity-blind indicator driven through full cycles. With
// C_add_i = scale * C_i the potential capacities sum to scale * C, and the
// expected added capacity comes out at scale times the optimum.
CheckResult legacy_cycles(RngStream& rng, double scale, const std::string& name) {
    const std::size_t n = 1000;
    const int trials = 10000;
    const double load = 1.75;  // legacy pi = 1.5: one sure node plus a coin flip
    const auto capacities = mixed_capacities(n);
    double total_capacity = 0.0;
    for (const double c : capacities) {
        total_capacity += c;
    }
    const double optimal = (load - kDesiredLoad) / kDesiredLoad * total_capacity;

    // Analytic expectation: sum(pi * C_add_i) = pi * scale * C.
    const double pi = legacy_addition_prob_indicator(load, kDesiredLoad);
    const double analytic = pi * scale * total_capacity;

    std::vector<double> added_per_trial(trials);
    for (int t = 0; t < trials; ++t) {
        double added = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double add_capacity = scale * capacities[i];
            int count = static_cast<int>(std::floor(pi));
            if (rng.uniform() < pi - std::floor(pi)) {
                ++count;
            }
            added += static_cast<double>(count) * add_capacity;
        }
        added_per_trial[t] = added;
    }

    const Sample sample = mean_and_std_error(added_per_trial);
    CheckResult result;
    result.name = name;
    result.expected = scale * optimal;
    result.observed = sample.mean;
    result.tolerance = 3.0 * sample.std_error;
    const bool analytic_ok = std::abs(analytic - scale * optimal) <= 1e-9 * optimal;
    result.pass = analytic_ok && std::abs(sample.mean - result.expected) <= result.tolerance;

    std::ostringstream note;
    note << "sum(C_add) = " << scale << "x total capacity; optimal " << optimal << ", analytic "
         << analytic;
    result.note = note.str();
    return result;
}

}  // namespace

std::vector<CheckResult> run_theorem_checks(std::uint64_t seed) {
    RngStream rng(seed, 0xdeca5);
    std::vector<CheckResult> results;
    results.push_back(removal_identity(rng));
    results.push_back(addition_identity(rng));
    results.push_back(removal_monte_carlo(rng));
    results.push_back(addition_monte_carlo(rng));
    results.push_back(legacy_cycles(rng, 1.0, "legacy-matched-sum"));
    results.push_back(legacy_cycles(rng, 2.0, "legacy-doubled-sum"));
    return results;
}

bool all_pass(const std::vector<CheckResult>& results) {
    for (const auto& result : results) {
        if (!result.pass) {
            return false;
        }
    }
    return true;
}

}  // namespace depas
