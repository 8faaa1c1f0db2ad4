#pragma once

#include <cstddef>

namespace depas {

struct AdmissionConfig {
    double max_queue_per_capacity = 3.0;  // max queue size, per unit of capacity
    int max_hops = 10;
    double mean_execution_time = 1.0;  // seconds
};

enum class AdmitAction { Enqueue, Forward, Reject };

// Decentralized admission rule: enqueue while the backlog-per-capacity ratio
// is strictly below the threshold (so the queue is capped at
// max_queue_per_capacity * capacity), otherwise forward until the hop budget
// is spent, then reject. A node that stopped accepting (draining out) skips
// straight to the forward branch.
AdmitAction admit_action(std::size_t queue_length, double capacity, int hops, bool accepting,
                         const AdmissionConfig& config);

}  // namespace depas
