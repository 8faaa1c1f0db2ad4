#include "depas/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace depas {

bool View::contains(NodeId node) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [node](const NeighborDescriptor& d) { return d.node == node; });
}

void View::erase(NodeId node) {
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [node](const NeighborDescriptor& d) { return d.node == node; }),
                   entries_.end());
}

bool View::insert(const NeighborDescriptor& descriptor, NodeId self) {
    if (descriptor.node == self || contains(descriptor.node) || entries_.size() >= max_size_) {
        return false;
    }
    entries_.push_back(descriptor);
    return true;
}

void View::sample_to_front(std::size_t count, std::size_t pool, RngStream& rng) {
    pool = std::min(pool, entries_.size());
    count = std::min(count, pool);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(pool - i));
        std::swap(entries_[i], entries_[std::min(j, pool - 1)]);
    }
}

void View::move_oldest_to_back(std::size_t count) {
    count = std::min(count, entries_.size());
    // Stable partial selection: repeatedly move the current oldest to the back.
    for (std::size_t moved = 0; moved < count; ++moved) {
        auto end = entries_.end() - static_cast<std::ptrdiff_t>(moved);
        auto oldest = std::max_element(entries_.begin(), end,
                                       [](const NeighborDescriptor& a, const NeighborDescriptor& b) {
                                           if (a.age != b.age) return a.age < b.age;
                                           return a.node < b.node;
                                       });
        std::rotate(oldest, oldest + 1, end);
    }
}

void View::take_head_into(std::size_t count, std::vector<NeighborDescriptor>& out) {
    count = std::min(count, entries_.size());
    out.insert(out.end(), entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(count));
    entries_.erase(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(count));
}

void View::increment_ages() {
    for (auto& d : entries_) {
        ++d.age;
    }
}

bool View::invariants_hold(NodeId self) const {
    if (entries_.size() > max_size_) return false;
    std::unordered_set<NodeId> seen;
    for (const auto& d : entries_) {
        if (d.node == self) return false;
        if (!seen.insert(d.node).second) return false;
    }
    return true;
}

void build_exchange_buffer(View& view, const NeighborDescriptor& self_fresh,
                           const OverlayConfig& config, RngStream& rng,
                           std::vector<NeighborDescriptor>& out) {
    out.push_back(self_fresh);
    if (config.swap <= 1) {
        return;
    }
    view.move_oldest_to_back(config.healing);
    const std::size_t protected_tail = std::min(config.healing, view.size());
    const std::size_t pool = view.size() - protected_tail;
    const std::size_t take = std::min(config.swap - 1, pool);
    view.sample_to_front(take, pool, rng);
    view.take_head_into(take, out);
}

void merge_exchange(View& view, NodeId self, const std::vector<NeighborDescriptor>& received,
                    const OverlayConfig& config, RngStream& rng) {
    auto& entries = view.entries_;
    const std::size_t max_size = view.max_size_;

    for (const auto& d : received) {
        if (d.node == self) {
            continue;
        }
        auto existing = std::find_if(entries.begin(), entries.end(),
                                     [&](const NeighborDescriptor& e) { return e.node == d.node; });
        if (existing == entries.end()) {
            entries.push_back(d);
        } else if (d.age < existing->age) {
            *existing = d;
        }
    }

    const auto overflow = [&]() -> std::size_t {
        return entries.size() > max_size ? entries.size() - max_size : 0;
    };

    // Healing: drop the oldest entries while over capacity.
    for (std::size_t dropped = 0, budget = std::min(config.healing, overflow()); dropped < budget; ++dropped) {
        auto oldest = std::max_element(entries.begin(), entries.end(),
                                       [](const NeighborDescriptor& a, const NeighborDescriptor& b) {
                                           if (a.age != b.age) return a.age < b.age;
                                           return a.node < b.node;
                                       });
        entries.erase(oldest);
    }

    // Random removal covers any remainder.
    while (overflow() > 0) {
        const std::size_t i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(entries.size()));
        entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(std::min(i, entries.size() - 1)));
    }

    view.increment_ages();
}

void refresh_from_summary(View& view, std::span<const NeighborDescriptor> summary) {
    for (auto& e : view.entries_) {
        for (const auto& s : summary) {
            if (s.node != e.node || s.age >= e.age) {
                continue;
            }
            e.age = s.age;
            if (s.has_load) {
                e.last_reported_load = s.last_reported_load;
                e.has_load = true;
            }
            break;
        }
    }
}

void gossip_exchange(NodeId a, View& view_a, const NeighborDescriptor& fresh_a, RngStream& rng_a,
                     NodeId b, View& view_b, const NeighborDescriptor& fresh_b, RngStream& rng_b,
                     const OverlayConfig& config) {
    // Knowledge refresh first, straight from each other's current state.
    refresh_from_summary(view_a, {&fresh_b, 1});
    refresh_from_summary(view_b, {&fresh_a, 1});
    refresh_from_summary(view_a, view_b.entries());
    refresh_from_summary(view_b, view_a.entries());

    // Then the link swap.
    static thread_local std::vector<NeighborDescriptor> push;
    static thread_local std::vector<NeighborDescriptor> pull;
    push.clear();
    pull.clear();
    build_exchange_buffer(view_a, fresh_a, config, rng_a, push);
    build_exchange_buffer(view_b, fresh_b, config, rng_b, pull);
    merge_exchange(view_a, a, pull, config, rng_a);
    merge_exchange(view_b, b, push, config, rng_b);
}

std::optional<NodeId> select_partner_oldest(const View& view) {
    if (view.empty()) {
        return std::nullopt;
    }
    const auto& entries = view.entries();
    auto oldest = std::max_element(entries.begin(), entries.end(),
                                   [](const NeighborDescriptor& a, const NeighborDescriptor& b) {
                                       if (a.age != b.age) return a.age < b.age;
                                       return a.node > b.node;
                                   });
    return oldest->node;
}

View bootstrap_view(const View& creator_view, const NeighborDescriptor& creator_self,
                    NodeId new_node, std::size_t max_size) {
    std::vector<NeighborDescriptor> entries = creator_view.entries();
    entries.push_back(creator_self);
    entries.erase(std::remove_if(entries.begin(), entries.end(),
                                 [new_node](const NeighborDescriptor& d) { return d.node == new_node; }),
                  entries.end());
    std::sort(entries.begin(), entries.end(), [](const NeighborDescriptor& a, const NeighborDescriptor& b) {
        if (a.age != b.age) return a.age < b.age;
        return a.node < b.node;
    });
    if (entries.size() > max_size) {
        entries.resize(max_size);
    }
    View view(max_size);
    for (const auto& d : entries) {
        view.insert(d, new_node);
    }
    return view;
}

InDegreeStats in_degree_stats(const std::vector<std::pair<NodeId, const View*>>& views) {
    if (views.size() < 2) {
        throw std::invalid_argument("in_degree_stats: undefined for fewer than 2 nodes");
    }
    std::unordered_map<NodeId, std::size_t> degree;
    degree.reserve(views.size());
    for (const auto& [owner, view] : views) {
        degree.emplace(owner, 0);
    }
    for (const auto& [owner, view] : views) {
        for (const auto& d : view->entries()) {
            auto it = degree.find(d.node);
            if (it != degree.end()) {
                ++it->second;
            }
        }
    }
    InDegreeStats stats;
    double sum = 0.0;
    for (const auto& [owner, view] : views) {
        const std::size_t d = degree.at(owner);
        sum += static_cast<double>(d);
        stats.max = std::max(stats.max, d);
    }
    stats.mean = sum / static_cast<double>(views.size());
    double variance = 0.0;
    for (const auto& [owner, view] : views) {
        const double diff = static_cast<double>(degree.at(owner)) - stats.mean;
        variance += diff * diff;
    }
    stats.std_dev = std::sqrt(variance / static_cast<double>(views.size()));
    return stats;
}

}  // namespace depas
