#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "depas/overlay.hpp"

namespace depas {

// Measurement window: requests processed or rejected by one node over one
// monitoring period.
struct LoadWindow {
    double window_length = 60.0;
    std::uint64_t processed = 0;
    std::uint64_t rejected = 0;

    void reset() {
        processed = 0;
        rejected = 0;
    }
};

// Load of one node over a full window: ((processed + rejected) / window) / capacity.
// Supra-unitary values are legal; rejected requests count toward load.
double node_load(const LoadWindow& window, double capacity);

// Per-second sliding window: the load is recomputed every second over the
// last window_length completed seconds. Young nodes are scaled by the history
// they actually have; there is no reading before one full second.
class SlidingLoadWindow {
public:
    SlidingLoadWindow() = default;
    SlidingLoadWindow(double window_length, double born);

    void record(double now, std::uint64_t count = 1);

    // Requests per second over the completed seconds of the window ending at
    // floor(now), divided by capacity.
    std::optional<double> load(double now, double capacity) const;

    bool has_full_window(double now) const;

private:
    struct Bucket {
        std::int64_t second = -1;
        std::uint32_t count = 0;
    };

    std::int64_t length_ = 60;
    std::int64_t born_second_ = 0;
    std::vector<Bucket> buckets_;

    // load() is pure per completed second; cache the latest evaluation.
    mutable std::int64_t cached_second_ = -1;
    mutable double cached_rate_ = 0.0;
};

// Capacity-weighted mean load over the node itself and the neighbors whose
// descriptors carry a load sample. With no usable neighbor it returns the
// node's own load.
double estimate_system_load(double self_load, double self_capacity,
                            std::span<const NeighborDescriptor> neighbors);

// Omniscient oracle: exact capacity-weighted average load over (load, capacity)
// pairs for every live node. Throws std::invalid_argument when empty.
double true_system_load(std::span<const std::pair<double, double>> load_and_capacity);

}  // namespace depas
