#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "depas/engine.hpp"

namespace depas {

struct WorkloadStep {
    double start_time = 0.0;
    double mean_rate = 0.0;  // requests per second
};

// Piecewise-constant mean request rate. Steps start at t = 0 and are strictly
// increasing in time.
struct WorkloadTrack {
    std::vector<WorkloadStep> steps;

    // Rate of the step active at `now` (greatest start_time <= now).
    double rate_at(double now) const;
};

// Next request instant: now plus an exponential inter-arrival whose mean is
// the reciprocal of the rate active at `now`.
double next_arrival_time(const WorkloadTrack& track, double now, RngStream& rng);

struct Request {
    std::uint64_t id = 0;
    double issue_time = 0.0;
    int hops = 0;
};

// Index into `items` chosen with probability proportional to capacity_of(item).
// Throws std::invalid_argument when there is no usable candidate.
template <typename Seq, typename CapacityFn>
std::size_t weighted_pick_index(const Seq& items, CapacityFn capacity_of, RngStream& rng) {
    if (items.empty()) {
        throw std::invalid_argument("weighted_pick: no candidates");
    }
    double total = 0.0;
    for (const auto& item : items) {
        total += capacity_of(item);
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("weighted_pick: total capacity must be positive");
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        acc += capacity_of(items[i]);
        if (u < acc) {
            return i;
        }
    }
    return items.size() - 1;
}

struct KnownWorker {
    NodeId node = 0;
    double capacity = 0.0;
};

struct EntryPointConfig {
    std::size_t min_size = 50;        // lower bound on known workers
    double fraction = 0.02;           // of the whole population
    double reshuffle_period = 120.0;  // seconds
};

// Fresh uniform sample of size min(total, max(min_size, ceil(fraction * total)))
// from the live workers.
std::vector<KnownWorker> reshuffle_entry_view(std::vector<KnownWorker> all_workers,
                                              const EntryPointConfig& config, RngStream& rng);

}  // namespace depas
