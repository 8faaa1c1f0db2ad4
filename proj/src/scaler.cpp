#include "depas/scaler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace depas {

double removal_prob_indicator(double estimate, double desired_load) {
    if (!(desired_load > 0.0)) {
        throw std::invalid_argument("removal_prob_indicator: desired load must be positive");
    }
    if (estimate < 0.0 || estimate > desired_load) {
        throw std::invalid_argument("removal_prob_indicator: estimate " + std::to_string(estimate) +
                                    " outside [0, " + std::to_string(desired_load) + "]");
    }
    return (desired_load - estimate) / desired_load;
}

double addition_prob_indicator(double estimate, double desired_load,
                               double self_capacity, double add_capacity) {
    if (!(self_capacity > 0.0) || !(add_capacity > 0.0)) {
        throw std::invalid_argument("addition_prob_indicator: capacities must be positive");
    }
    if (!(desired_load > 0.0) || estimate < desired_load) {
        throw std::invalid_argument("addition_prob_indicator: estimate " + std::to_string(estimate) +
                                    " below desired load " + std::to_string(desired_load));
    }
    return (estimate - desired_load) / desired_load * (self_capacity / add_capacity);
}

double legacy_addition_prob_indicator(double estimate, double desired_load) {
    if (!(desired_load > 0.0) || estimate < desired_load) {
        throw std::invalid_argument("legacy_addition_prob_indicator: estimate below desired load");
    }
    return (estimate - desired_load) / desired_load;
}

ScalingDecision decide(double estimate, const ScalerConfig& config,
                       double self_capacity, double add_capacity, RngStream& rng) {
    if (estimate <= config.desired_load - config.load_variation) {
        const double pi = removal_prob_indicator(estimate, config.desired_load);
        if (rng.uniform() < pi) {
            return ScalingDecision{ScalingDecision::Kind::RemoveSelf, 0, 0.0};
        }
        return ScalingDecision{};
    }
    if (estimate >= config.desired_load + config.load_variation) {
        const double pi = addition_prob_indicator(estimate, config.desired_load, self_capacity, add_capacity);
        int count = static_cast<int>(std::floor(pi));
        if (rng.uniform() < pi - std::floor(pi)) {
            ++count;
        }
        if (count >= 1) {
            return ScalingDecision{ScalingDecision::Kind::Add, count, add_capacity};
        }
        return ScalingDecision{};
    }
    return ScalingDecision{};
}

const ProvisioningEpoch& provisioning_at(const ProvisioningPolicy& policy, double now) {
    if (policy.epochs.empty() || now < policy.epochs.front().from_time) {
        throw std::logic_error("provisioning_at: no epoch covers t=" + std::to_string(now));
    }
    const ProvisioningEpoch* active = &policy.epochs.front();
    for (const auto& epoch : policy.epochs) {
        if (epoch.from_time <= now) {
            active = &epoch;
        } else {
            break;
        }
    }
    return *active;
}

}  // namespace depas
