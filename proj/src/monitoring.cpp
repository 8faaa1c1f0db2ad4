#include "depas/monitoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace depas {

double node_load(const LoadWindow& window, double capacity) {
    if (!(capacity > 0.0)) {
        throw std::invalid_argument("node_load: capacity must be positive, got " + std::to_string(capacity));
    }
    if (!(window.window_length > 0.0)) {
        throw std::invalid_argument("node_load: window length must be positive");
    }
    const double per_second = static_cast<double>(window.processed + window.rejected) / window.window_length;
    return per_second / capacity;
}

SlidingLoadWindow::SlidingLoadWindow(double window_length, double born)
    : length_(std::max<std::int64_t>(1, static_cast<std::int64_t>(window_length))),
      born_second_(static_cast<std::int64_t>(std::floor(born))),
      buckets_(static_cast<std::size_t>(length_)) {}

void SlidingLoadWindow::record(double now, std::uint64_t count) {
    const auto second = static_cast<std::int64_t>(std::floor(now));
    Bucket& bucket = buckets_[static_cast<std::size_t>(second % length_)];
    if (bucket.second != second) {
        bucket.second = second;
        bucket.count = 0;
    }
    bucket.count += static_cast<std::uint32_t>(count);
    // The current second is never part of a completed-window reading, so the
    // cache stays valid.
}

std::optional<double> SlidingLoadWindow::load(double now, double capacity) const {
    const auto current = static_cast<std::int64_t>(std::floor(now));
    const std::int64_t history = std::min<std::int64_t>(length_, current - born_second_);
    if (history < 1) {
        return std::nullopt;
    }
    if (current != cached_second_) {
        std::uint64_t total = 0;
        for (const Bucket& bucket : buckets_) {
            if (bucket.second >= current - history && bucket.second < current) {
                total += bucket.count;
            }
        }
        cached_second_ = current;
        cached_rate_ = static_cast<double>(total) / static_cast<double>(history);
    }
    return cached_rate_ / capacity;
}

bool SlidingLoadWindow::has_full_window(double now) const {
    return static_cast<std::int64_t>(std::floor(now)) - born_second_ >= length_;
}

double estimate_system_load(double self_load, double self_capacity,
                            std::span<const NeighborDescriptor> neighbors) {
    double weighted = self_load * self_capacity;
    double total_capacity = self_capacity;
    for (const auto& d : neighbors) {
        if (!d.has_load) {
            continue;
        }
        weighted += d.last_reported_load * d.capacity;
        total_capacity += d.capacity;
    }
    return weighted / total_capacity;
}

double true_system_load(std::span<const std::pair<double, double>> load_and_capacity) {
    if (load_and_capacity.empty()) {
        throw std::invalid_argument("true_system_load: undefined for zero nodes");
    }
    double weighted = 0.0;
    double total_capacity = 0.0;
    for (const auto& [load, capacity] : load_and_capacity) {
        weighted += load * capacity;
        total_capacity += capacity;
    }
    return weighted / total_capacity;
}

}  // namespace depas
