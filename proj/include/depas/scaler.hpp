#pragma once

#include <string>
#include <vector>

#include "depas/engine.hpp"

namespace depas {

// Parameters of the probabilistic auto-scaler. The goal is to keep the
// average system load inside (desired_load - load_variation,
// desired_load + load_variation).
struct ScalerConfig {
    double cycle_period = 60.0;   // seconds between decisions on one node
    double desired_load = 0.7;
    double load_variation = 0.1;
    bool enabled = true;
};

// Removal probability indicator: (L0 - L*) / L0. Sub-unitary whenever
// 0 <= L* <= L0, and used directly as the probability to remove self.
double removal_prob_indicator(double estimate, double desired_load);

// Addition probability indicator: ((L* - L0) / L0) * (C_self / C_add).
// May exceed 1; the integer part is a deterministic add count and the
// fractional part the probability of one more node. The C_self / C_add
// factor is what makes the expected added capacity exact for arbitrary
// new-node capacities.
double addition_prob_indicator(double estimate, double desired_load,
                               double self_capacity, double add_capacity);

// Earlier homogeneous-system indicator: (L* - L0) / L0, with no capacity
// correction. Correct only when the potential capacities to be added sum to
// the total system capacity; kept to demonstrate that failure mode.
double legacy_addition_prob_indicator(double estimate, double desired_load);

struct ScalingDecision {
    enum class Kind { RemoveSelf, NoOp, Add };
    Kind kind = Kind::NoOp;
    int add_count = 0;
    double add_capacity = 0.0;
};

// One probabilistic decision. Acts with probability equal to the indicator:
// below the low threshold the node removes itself with probability pi; above
// the high threshold it adds floor(pi) nodes plus one more with probability
// frac(pi); inside the dead zone it does nothing and consumes no randomness.
ScalingDecision decide(double estimate, const ScalerConfig& config,
                       double self_capacity, double add_capacity, RngStream& rng);

struct ProvisioningEpoch {
    double from_time = 0.0;
    std::string type_label;
    double capacity = 0.0;
};

// Which node type new nodes get, as a function of time. Epochs are strictly
// increasing and the first one must cover t = 0 (validated at scenario load).
struct ProvisioningPolicy {
    std::vector<ProvisioningEpoch> epochs;
};

const ProvisioningEpoch& provisioning_at(const ProvisioningPolicy& policy, double now);

}  // namespace depas
