#include "depas/traffic.hpp"

#include <algorithm>
#include <cmath>

namespace depas {

double WorkloadTrack::rate_at(double now) const {
    if (steps.empty()) {
        throw std::logic_error("WorkloadTrack: empty track");
    }
    double rate = steps.front().mean_rate;
    for (const auto& step : steps) {
        if (step.start_time <= now) {
            rate = step.mean_rate;
        } else {
            break;
        }
    }
    return rate;
}

double next_arrival_time(const WorkloadTrack& track, double now, RngStream& rng) {
    const double rate = track.rate_at(now);
    return now + rng.exponential(1.0 / rate);
}

std::vector<KnownWorker> reshuffle_entry_view(std::vector<KnownWorker> all_workers,
                                              const EntryPointConfig& config, RngStream& rng) {
    const std::size_t total = all_workers.size();
    // Epsilon guard keeps ceil() from tipping over on binary fractions.
    const auto by_fraction =
        static_cast<std::size_t>(std::ceil(config.fraction * static_cast<double>(total) - 1e-9));
    const std::size_t target = std::min(total, std::max(config.min_size, by_fraction));

    // Partial Fisher-Yates over the candidate list.
    for (std::size_t i = 0; i < target; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(total - i));
        std::swap(all_workers[i], all_workers[std::min(j, total - 1)]);
    }
    all_workers.resize(target);
    return all_workers;
}

}  // namespace depas
