#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "depas/overlay.hpp"

using namespace depas;

namespace {

NeighborDescriptor desc(NodeId node, std::uint32_t age) {
    return NeighborDescriptor{node, 1.0, age, 0.0, false};
}

std::set<NodeId> members(const View& view) {
    std::set<NodeId> out;
    for (const auto& d : view.entries()) {
        out.insert(d.node);
    }
    return out;
}

// Standalone gossip population mirroring the simulator's cycle handler:
// every live node initiates one exchange per cycle with its oldest entry;
// contacting a dead node drops the link.
struct GossipWorld {
    OverlayConfig config;
    std::uint64_t seed;
    std::map<NodeId, View> views;
    std::map<NodeId, RngStream> rngs;
    std::set<NodeId> dead;

    GossipWorld(OverlayConfig cfg, std::uint64_t seed_value) : config(cfg), seed(seed_value) {}

    void add_uniform_population(std::size_t count) {
        RngStream boot(seed, 999);
        for (NodeId id = 0; id < count; ++id) {
            views.emplace(id, View(config.degree));
            rngs.emplace(id, RngStream(seed, id));
        }
        for (auto& [id, view] : views) {
            std::vector<NodeId> candidates;
            for (NodeId other = 0; other < count; ++other) {
                if (other != id) {
                    candidates.push_back(other);
                }
            }
            const std::size_t want = std::min(config.degree, candidates.size());
            for (std::size_t i = 0; i < want; ++i) {
                const std::size_t j =
                    i + static_cast<std::size_t>(boot.uniform() * double(candidates.size() - i));
                std::swap(candidates[i], candidates[std::min(j, candidates.size() - 1)]);
                view.insert(desc(candidates[i], 0), id);
            }
        }
    }

    // Sequential-join bootstrap: each node after the first copies a random
    // existing node's view plus that node itself.
    void add_join_population(std::size_t count) {
        RngStream boot(seed, 999);
        for (NodeId id = 0; id < count; ++id) {
            rngs.emplace(id, RngStream(seed, id));
            if (id == 0) {
                views.emplace(id, View(config.degree));
                continue;
            }
            const NodeId creator = static_cast<NodeId>(boot.uniform() * double(id));
            views.emplace(id, bootstrap_view(views.at(creator), desc(creator, 0), id, config.degree));
        }
    }

    void kill(NodeId id) {
        dead.insert(id);
        views.erase(id);
        rngs.erase(id);
    }

    void cycle() {
        for (auto& [id, view] : views) {
            const auto partner = select_partner_oldest(view);
            if (!partner) {
                continue;
            }
            if (dead.count(*partner) != 0) {
                view.erase(*partner);
                view.increment_ages();
                continue;
            }
            gossip_exchange(id, view, desc(id, 0), rngs.at(id), *partner, views.at(*partner),
                            desc(*partner, 0), rngs.at(*partner), config);
        }
    }

    std::size_t stale_descriptors() const {
        std::size_t count = 0;
        for (const auto& [id, view] : views) {
            for (const auto& d : view.entries()) {
                count += dead.count(d.node);
            }
        }
        return count;
    }

    bool invariants_hold() const {
        return std::all_of(views.begin(), views.end(),
                           [](const auto& kv) { return kv.second.invariants_hold(kv.first); });
    }
};

}  // namespace

TEST_CASE("merge drops a dead high-age descriptor once it ranks among the H oldest") {
    // Hand-traced with view capacity 4 and H=1: a view holding [Y age0, Z age3]
    // merges a buffer [A age0, D age9, K age1] where D points at a dead node.
    // Five entries overflow by one, so the single healing drop removes the
    // oldest entry, D. Survivors age by one: {Y1, Z4, A1, K2}.
    OverlayConfig config{4, 0.5, 1, 4};
    View view(4);
    view.insert(desc(102, 0), 1);  // Y
    view.insert(desc(103, 3), 1);  // Z
    RngStream rng(1, 1);
    merge_exchange(view, 1, {desc(200, 0), desc(666, 9), desc(201, 1)}, config, rng);

    CHECK(members(view) == std::set<NodeId>{102, 103, 200, 201});
    for (const auto& d : view.entries()) {
        if (d.node == 102) CHECK(d.age == 1);
        if (d.node == 103) CHECK(d.age == 4);
        if (d.node == 200) CHECK(d.age == 1);
        if (d.node == 201) CHECK(d.age == 2);
    }
    CHECK(view.invariants_hold(1));
}

TEST_CASE("merge keeps the fresher copy of a duplicate and never duplicates entries") {
    OverlayConfig config{4, 0.5, 1, 4};
    View view(4);
    view.insert(desc(102, 5), 1);
    RngStream rng(1, 1);
    merge_exchange(view, 1, {desc(102, 2), desc(103, 0)}, config, rng);
    REQUIRE(view.size() == 2);
    for (const auto& d : view.entries()) {
        if (d.node == 102) CHECK(d.age == 3);  // refreshed to the younger copy, then aged
        if (d.node == 103) CHECK(d.age == 1);
    }
}

TEST_CASE("full disjoint views stay exactly at max size after an exchange") {
    OverlayConfig config{50, 0.5, 5, 25};
    View a(50);
    View b(50);
    for (NodeId i = 0; i < 50; ++i) {
        a.insert(desc(100 + i, i % 7), 1);
        b.insert(desc(200 + i, i % 5), 2);
    }
    RngStream rng_a(3, 1);
    RngStream rng_b(3, 2);
    gossip_exchange(1, a, desc(1, 0), rng_a, 2, b, desc(2, 0), rng_b, config);
    CHECK(a.size() == 50);
    CHECK(b.size() == 50);
    CHECK(a.invariants_hold(1));
    CHECK(b.invariants_hold(2));
}

TEST_CASE("push half: an unknown node becomes referenced after one exchange") {
    OverlayConfig config{50, 0.5, 5, 25};
    View a(50);
    View b(50);
    a.insert(desc(2, 0), 1);  // A knows B, nobody knows A
    for (NodeId i = 0; i < 50; ++i) {
        b.insert(desc(300 + i, 2), 2);
    }
    RngStream rng_a(4, 1);
    RngStream rng_b(4, 2);
    gossip_exchange(1, a, desc(1, 0), rng_a, 2, b, desc(2, 0), rng_b, config);
    CHECK(b.contains(1));
}

TEST_CASE("bootstrap view copies the creator view plus the creator") {
    View creator_view(50);
    for (NodeId i = 0; i < 50; ++i) {
        creator_view.insert(desc(100 + i, static_cast<std::uint32_t>(i)), 5);
    }
    const View fresh = bootstrap_view(creator_view, desc(5, 0), 999, 50);
    CHECK(fresh.size() == 50);
    CHECK(fresh.contains(5));
    // The oldest copied entry gave way to the creator descriptor.
    CHECK(!fresh.contains(149));
    CHECK(fresh.invariants_hold(999));

    const View sole = bootstrap_view(View(50), desc(5, 0), 999, 50);
    CHECK(sole.size() == 1);
    CHECK(sole.contains(5));
}

TEST_CASE("joined node is referenced after its first exchange") {
    OverlayConfig config{50, 0.5, 5, 25};
    GossipWorld world(config, 11);
    world.add_uniform_population(20);
    // New node bootstraps off node 0.
    world.views.emplace(100, bootstrap_view(world.views.at(0), desc(0, 0), 100, config.degree));
    world.rngs.emplace(100, RngStream(11, 100));
    world.cycle();
    std::size_t referencing = 0;
    for (const auto& [id, view] : world.views) {
        if (id != 100 && view.contains(100)) {
            ++referencing;
        }
    }
    CHECK(referencing >= 1);
}

TEST_CASE("departed nodes purge from all views within 20 cycles") {
    OverlayConfig config{50, 0.5, 5, 25};
    GossipWorld world(config, 21);
    world.add_uniform_population(200);
    for (int i = 0; i < 30; ++i) {
        world.cycle();
    }
    REQUIRE(world.invariants_hold());

    SUBCASE("single leave") {
        world.kill(17);
        std::size_t previous = world.stale_descriptors();
        CHECK(previous > 0);
        for (int c = 1; c <= 20; ++c) {
            world.cycle();
            const std::size_t current = world.stale_descriptors();
            CHECK(current <= previous);  // monotone decay, plateaus allowed
            previous = current;
        }
        CHECK(previous == 0);
        CHECK(world.invariants_hold());
    }

    SUBCASE("two simultaneous leaves purge independently") {
        world.kill(17);
        world.kill(42);
        for (int c = 0; c < 20; ++c) {
            world.cycle();
        }
        CHECK(world.stale_descriptors() == 0);
    }

    SUBCASE("leave of an unreferenced node changes nothing") {
        // Manufacture a node nobody references.
        world.views.emplace(500, View(config.degree));
        world.rngs.emplace(500, RngStream(21, 500));
        const auto snapshot = [&] {
            std::map<NodeId, std::set<NodeId>> s;
            for (const auto& [id, view] : world.views) {
                s[id] = members(view);
            }
            return s;
        };
        const auto before = snapshot();
        world.kill(500);
        auto after = snapshot();
        after[500] = before.at(500);
        CHECK(before == after);
    }
}

TEST_CASE("in-degree statistics") {
    View a(10), b(10), c(10);
    a.insert(desc(2, 0), 1);
    a.insert(desc(3, 0), 1);
    b.insert(desc(1, 0), 2);
    b.insert(desc(3, 0), 2);
    c.insert(desc(1, 0), 3);
    c.insert(desc(2, 0), 3);
    const auto stats = in_degree_stats({{1, &a}, {2, &b}, {3, &c}});
    CHECK(stats.mean == doctest::Approx(2.0));
    CHECK(stats.std_dev == doctest::Approx(0.0));
    CHECK(stats.max == 2);

    CHECK_THROWS_AS(in_degree_stats({{1, &a}}), std::invalid_argument);
}

TEST_CASE("view invariants hold through sustained gossip") {
    OverlayConfig config{20, 0.5, 2, 10};
    GossipWorld world(config, 31);
    world.add_join_population(60);
    for (int c = 0; c < 50; ++c) {
        world.cycle();
        REQUIRE(world.invariants_hold());
    }
    const auto stats = [&] {
        std::vector<std::pair<NodeId, const View*>> views;
        for (const auto& [id, view] : world.views) {
            views.emplace_back(id, &view);
        }
        return in_degree_stats(views);
    }();
    CHECK(stats.mean > 0.0);
}
