#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "depas/engine.hpp"

namespace depas {

// View entry describing another worker. Age counts gossip cycles since the
// owner stamped it; capacity and the owner's latest measured load piggyback
// on the descriptor so the load estimator needs no extra messages.
struct NeighborDescriptor {
    NodeId node = 0;
    double capacity = 0.0;
    std::uint32_t age = 0;
    double last_reported_load = 0.0;
    bool has_load = false;
};

struct OverlayConfig {
    std::size_t degree = 50;     // max view size
    double cycle_period = 0.5;   // seconds between active exchanges
    std::size_t healing = 5;     // H: oldest entries dropped when a merge overflows
    std::size_t swap = 25;       // S: exchange buffer size; sent entries dropped first
};

// Bounded partial view of the membership. Entry order is protocol state: the
// exchange buffer is drawn from the front after a permutation.
class View {
public:
    View() = default;
    explicit View(std::size_t max_size) : max_size_(max_size) {}

    std::size_t max_size() const { return max_size_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<NeighborDescriptor>& entries() const { return entries_; }

    bool contains(NodeId node) const;
    void erase(NodeId node);
    // Insertion helper for bootstrap; ignores self/duplicates, fails when full.
    bool insert(const NeighborDescriptor& descriptor, NodeId self);

    void move_oldest_to_back(std::size_t count);
    // Uniform random sample of `count` entries from the first `pool` ones,
    // shuffled to the front.
    void sample_to_front(std::size_t count, std::size_t pool, RngStream& rng);
    // Move the first `count` entries out of the view, appending them to `out`.
    void take_head_into(std::size_t count, std::vector<NeighborDescriptor>& out);
    void increment_ages();

    // True when the view holds no self-descriptor, no duplicate node, and at
    // most max_size entries.
    bool invariants_hold(NodeId self) const;

private:
    friend void merge_exchange(View&, NodeId, const std::vector<NeighborDescriptor>&,
                               const OverlayConfig&, RngStream&);
    friend void refresh_from_summary(View&, std::span<const NeighborDescriptor>);

    std::vector<NeighborDescriptor> entries_;
    std::size_t max_size_ = 0;
};

// Append the buffer one side sends in an exchange: a fresh self-descriptor
// plus up to swap-1 random entries moved out of the view (the healing oldest
// entries are protected from the draw, so stale links are not propagated).
// Moving rather than copying keeps the population of any third-party
// descriptor from growing, so stale descriptors can only decay.
void build_exchange_buffer(View& view, const NeighborDescriptor& self_fresh,
                           const OverlayConfig& config, RngStream& rng,
                           std::vector<NeighborDescriptor>& out);

// Fold a received buffer into the view: merge each descriptor (keeping the
// fresher copy of a duplicate), then shed any overflow by dropping the
// healing oldest entries first and random entries after. Ages increment at
// the end.
void merge_exchange(View& view, NodeId self, const std::vector<NeighborDescriptor>& received,
                    const OverlayConfig& config, RngStream& rng);

// Refresh ages and reported loads of entries the view already holds from a
// peer's knowledge, keeping whichever copy is fresher. Never creates entries,
// so it cannot resurrect links to departed nodes.
void refresh_from_summary(View& view, std::span<const NeighborDescriptor> summary);

// One push-pull exchange between an initiator and the partner it selected
// from its own view. Both sides swap link entries and then refresh each
// other's remaining entries from the peer's pre-exchange knowledge.
void gossip_exchange(NodeId a, View& view_a, const NeighborDescriptor& fresh_a, RngStream& rng_a,
                     NodeId b, View& view_b, const NeighborDescriptor& fresh_b, RngStream& rng_b,
                     const OverlayConfig& config);

// Partner choice: the oldest descriptor (ties broken by node id). Oldest-first
// keeps contacting the entries most likely to be dead, which purges them.
std::optional<NodeId> select_partner_oldest(const View& view);

// Initial view of a freshly created node: the creator's entries plus the
// creator itself, truncated to max_size keeping the freshest.
View bootstrap_view(const View& creator_view, const NeighborDescriptor& creator_self,
                    NodeId new_node, std::size_t max_size);

struct InDegreeStats {
    double mean = 0.0;
    double std_dev = 0.0;
    std::size_t max = 0;
};

// Population statistics of the in-degree (number of views containing each
// node). Throws std::invalid_argument with fewer than two nodes.
InDegreeStats in_degree_stats(const std::vector<std::pair<NodeId, const View*>>& views);

}  // namespace depas
