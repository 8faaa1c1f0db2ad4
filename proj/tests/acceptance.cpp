// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one pass/fail line per criterion. Exits non-zero if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "depas/metrics.hpp"
#include "depas/overlay.hpp"
#include "depas/scaler.hpp"
#include "depas/scenario.hpp"
#include "depas/simulation.hpp"
#include "depas/theorems.hpp"
#include "depas/traffic.hpp"

using namespace depas;

namespace {

int failures = 0;
std::vector<std::string> notes;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %d (%s): %s%s%s\n", criterion, name.c_str(), pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) {
        ++failures;
    }
}

bool check(bool condition, const std::string& what) {
    if (!condition) {
        notes.push_back(what);
    }
    return condition;
}

std::string drain_notes() {
    std::string joined;
    for (const auto& note : notes) {
        joined += (joined.empty() ? "" : "; ") + note;
    }
    notes.clear();
    return joined;
}

// --- criterion 1: formula evaluations match hand computations exactly -------

void criterion_formulas() {
    bool ok = true;
    ok &= check(removal_prob_indicator(0.35, 0.7) == 0.5, "removal(0.35)");
    ok &= check(removal_prob_indicator(0.7, 0.7) == 0.0, "removal at L0");
    ok &= check(removal_prob_indicator(0.0, 0.7) == 1.0, "removal idle");
    ok &= check(addition_prob_indicator(1.4, 0.7, 1.0, 5.0) == 0.2, "addition 1->5");
    ok &= check(addition_prob_indicator(1.4, 0.7, 5.0, 1.0) == 5.0, "addition 5->1");
    ok &= check(addition_prob_indicator(0.7, 0.7, 3.0, 9.0) == 0.0, "addition at L0");
    ok &= check(legacy_addition_prob_indicator(1.4, 0.7) == 1.0, "legacy(1.4)");
    ok &= check(legacy_addition_prob_indicator(0.7, 0.7) == 0.0, "legacy at L0");
    report(1, "formula unit suite", ok, drain_notes());
}

// --- criteria 2-4: identities, Monte-Carlo cycles, legacy falsification -----

void criterion_theorems() {
    const auto results = run_theorem_checks(1);
    const auto find = [&](const std::string& name) -> const CheckResult& {
        for (const auto& result : results) {
            if (result.name == name) {
                return result;
            }
        }
        std::fprintf(stderr, "missing check %s\n", name.c_str());
        std::exit(2);
    };

    const auto describe = [](const CheckResult& r) {
        std::ostringstream out;
        out << r.name << " expected " << r.expected << " observed " << r.observed << " (tol "
            << r.tolerance << ")";
        return out.str();
    };

    {
        const auto& identity = find("removal-identity");
        report(2, "removal expectation identity", identity.pass, describe(identity));
    }
    {
        const auto& identity = find("addition-identity");
        const auto& monte = find("addition-monte-carlo");
        const auto& removal_mc = find("removal-monte-carlo");
        report(3, "addition identity and simulated cycles",
               identity.pass && monte.pass && removal_mc.pass,
               describe(identity) + "; " + describe(monte) + "; " + describe(removal_mc));
    }
    {
        const auto& matched = find("legacy-matched-sum");
        const auto& doubled = find("legacy-doubled-sum");
        report(4, "legacy indicator falsification", matched.pass && doubled.pass,
               describe(matched) + "; " + describe(doubled));
    }
}

// --- criterion 5: dynamic-workload replication at desk scale ----------------

struct Plateau {
    double start = 0.0;
    double end = 0.0;
    double rate = 0.0;
};

std::vector<Plateau> plateaus_of(const Scenario& scenario, double min_length) {
    std::vector<Plateau> out;
    const auto& steps = scenario.track.steps;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double end = (i + 1 < steps.size()) ? steps[i + 1].start_time : scenario.run.horizon;
        if (end - steps[i].start_time >= min_length) {
            out.push_back(Plateau{steps[i].start_time, end, steps[i].mean_rate});
        }
    }
    return out;
}

void criterion_experiment() {
    const Scenario scenario = Scenario::default_experiment();
    const int runs = 8;
    const auto agg = aggregate_runs(scenario, runs, scenario.run.seed);

    const std::size_t capacity_col = agg.column_index("total_capacity");
    const std::size_t n_low_col = agg.column_index("n_low");
    const std::size_t n_high_col = agg.column_index("n_high");
    const std::size_t n_total_col = agg.column_index("n_total");

    const auto sample_at = [&](double time) {
        for (std::size_t i = 0; i < agg.time.size(); ++i) {
            if (agg.time[i] == time) {
                return i;
            }
        }
        std::fprintf(stderr, "no sample at t=%f\n", time);
        std::exit(2);
    };

    bool ok = true;

    // (a) initial state: 100 low-capacity nodes and nothing else.
    ok &= check(agg.mean[n_low_col][0] == 100.0 && agg.std_dev[n_low_col][0] == 0.0,
                "initial low count");
    ok &= check(agg.mean[n_high_col][0] == 0.0, "initial high count");
    ok &= check(agg.mean[capacity_col][0] == 100.0, "initial capacity");

    // (b) provisioning epochs: high-capacity count only grows before t=1100,
    // only shrinks afterwards; low-capacity count does not grow before 1100.
    const double epoch_switch = 1100.0;
    for (std::size_t i = 0; i + 1 < agg.time.size(); ++i) {
        if (agg.time[i + 1] <= epoch_switch) {
            ok &= check(agg.mean[n_high_col][i + 1] >= agg.mean[n_high_col][i],
                        "n_high decreased at t=" + std::to_string(agg.time[i + 1]));
            ok &= check(agg.mean[n_low_col][i + 1] <= agg.mean[n_low_col][i],
                        "n_low grew at t=" + std::to_string(agg.time[i + 1]));
        } else if (agg.time[i] >= epoch_switch) {
            ok &= check(agg.mean[n_high_col][i + 1] <= agg.mean[n_high_col][i],
                        "n_high grew at t=" + std::to_string(agg.time[i + 1]));
        }
    }

    // (c) per-plateau settling: mean capacity over the final 120 s inside
    // [offered/(L0+delta), offered/(L0-delta)].
    // (d) no oscillation inside those settled windows: capacity rises and
    // falls may not both exceed 2% of the plateau capacity.
    for (const Plateau& plateau : plateaus_of(scenario, 300.0)) {
        const std::size_t begin = sample_at(plateau.end - 120.0);
        const std::size_t end = sample_at(plateau.end - scenario.run.sample_period);
        double mean_capacity = 0.0;
        double rises = 0.0;
        double falls = 0.0;
        for (std::size_t i = begin; i <= end; ++i) {
            mean_capacity += agg.mean[capacity_col][i];
            if (i > begin) {
                const double delta = agg.mean[capacity_col][i] - agg.mean[capacity_col][i - 1];
                (delta >= 0 ? rises : falls) += std::abs(delta);
            }
        }
        mean_capacity /= static_cast<double>(end - begin + 1);

        const double lo = plateau.rate / (scenario.scaler.desired_load + scenario.scaler.load_variation);
        const double hi = plateau.rate / (scenario.scaler.desired_load - scenario.scaler.load_variation);
        std::ostringstream where;
        where << "plateau " << plateau.rate << " req/s [" << plateau.start << "," << plateau.end << ")";
        ok &= check(mean_capacity >= lo && mean_capacity <= hi,
                    where.str() + ": capacity " + std::to_string(mean_capacity) + " outside [" +
                        std::to_string(lo) + "," + std::to_string(hi) + "]");
        const double threshold = 0.02 * mean_capacity;
        ok &= check(!(rises > threshold && falls > threshold),
                    where.str() + ": oscillation (rises " + std::to_string(rises) + ", falls " +
                        std::to_string(falls) + ")");
    }

    // (e) scale-down: both type counts drop and the type mix stays put
    // (fraction drift below 10 percentage points).
    const auto& steps = scenario.track.steps;
    double peak_rate = 0.0;
    double scale_down_start = scenario.run.horizon;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].mean_rate > peak_rate) {
            peak_rate = steps[i].mean_rate;
            scale_down_start = (i + 1 < steps.size()) ? steps[i + 1].start_time : scenario.run.horizon;
        }
    }
    const std::size_t down_begin = sample_at(scale_down_start);
    const std::size_t down_end = agg.time.size() - 1;
    ok &= check(agg.mean[n_low_col][down_end] < agg.mean[n_low_col][down_begin],
                "low count did not decrease over the scale-down phase");
    ok &= check(agg.mean[n_high_col][down_end] < agg.mean[n_high_col][down_begin],
                "high count did not decrease over the scale-down phase");
    const double low_fraction_begin =
        agg.mean[n_low_col][down_begin] / agg.mean[n_total_col][down_begin];
    const double low_fraction_end = agg.mean[n_low_col][down_end] / agg.mean[n_total_col][down_end];
    ok &= check(std::abs(low_fraction_end - low_fraction_begin) < 0.10,
                "type mix drifted " + std::to_string(100.0 * std::abs(low_fraction_end - low_fraction_begin)) +
                    " percentage points");

    std::ostringstream detail;
    detail << runs << " runs, seeds " << scenario.run.seed << ".."
           << scenario.run.seed + runs - 1;
    const std::string issues = drain_notes();
    report(5, "dynamic workload replication", ok, issues.empty() ? detail.str() : issues);
}

// --- criterion 6: overlay properties at 500 nodes ----------------------------

struct GossipWorld {
    OverlayConfig config;
    std::uint64_t seed;
    std::map<NodeId, View> views;
    std::map<NodeId, RngStream> rngs;
    std::set<NodeId> dead;

    GossipWorld(OverlayConfig cfg, std::uint64_t seed_value) : config(cfg), seed(seed_value) {}

    // Sequential-join bootstrap, mirroring how nodes enter the simulator.
    void populate(std::size_t count) {
        RngStream boot(seed, 999);
        for (NodeId id = 0; id < count; ++id) {
            rngs.emplace(id, RngStream(seed, id));
            if (id == 0) {
                views.emplace(id, View(config.degree));
                continue;
            }
            const NodeId creator = static_cast<NodeId>(boot.uniform() * static_cast<double>(id));
            views.emplace(id, bootstrap_view(views.at(creator),
                                             NeighborDescriptor{creator, 1.0, 0, 0.0, false}, id,
                                             config.degree));
        }
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
            gossip_exchange(id, view, NeighborDescriptor{id, 1.0, 0, 0.0, false}, rngs.at(id),
                            *partner, views.at(*partner),
                            NeighborDescriptor{*partner, 1.0, 0, 0.0, false}, rngs.at(*partner),
                            config);
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
};

void criterion_overlay() {
    GossipWorld world(OverlayConfig{50, 0.5, 5, 25}, 17);
    world.populate(500);
    for (int c = 0; c < 100; ++c) {
        world.cycle();
    }

    std::vector<std::pair<NodeId, const View*>> views;
    for (const auto& [id, view] : world.views) {
        views.emplace_back(id, &view);
    }
    const auto stats = in_degree_stats(views);
    const double ratio = stats.std_dev / stats.mean;
    bool ok = check(ratio < 0.35, "in-degree std/mean " + std::to_string(ratio));

    RngStream kill_rng(17, 5000);
    std::vector<NodeId> ids;
    for (const auto& [id, view] : world.views) {
        ids.push_back(id);
    }
    for (int k = 0; k < 50; ++k) {
        const std::size_t i = static_cast<std::size_t>(kill_rng.uniform() * static_cast<double>(ids.size()));
        const NodeId victim = ids[std::min(i, ids.size() - 1)];
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(std::min(i, ids.size() - 1)));
        world.dead.insert(victim);
        world.views.erase(victim);
        world.rngs.erase(victim);
    }
    for (int c = 0; c < 20; ++c) {
        world.cycle();
    }
    const std::size_t stale = world.stale_descriptors();
    ok &= check(stale == 0, "stale descriptors after 20 cycles: " + std::to_string(stale));

    std::ostringstream detail;
    detail << "in-degree std/mean " << ratio << " (guard 0.35), stale after 20 cycles " << stale;
    const std::string issues = drain_notes();
    report(6, "overlay properties", ok, issues.empty() ? detail.str() : issues);
}

// --- criterion 7: load balancing -------------------------------------------

void criterion_load_balancing() {
    // Static homogeneous population at true load 0.5.
    Scenario s = Scenario::default_experiment();
    s.run.horizon = 150.0;
    s.scaler.enabled = false;
    s.types = {{"std", 1.0}};
    s.initial = {{"std", 200}};
    s.policy.epochs = {{0.0, "std", 1.0}};
    s.track.steps = {{0.0, 100.0}};

    Simulation sim(s, 11);
    sim.run();
    sim.run_extra(60.0);
    const auto& summary = sim.summary();
    const double rejection_rate =
        static_cast<double>(summary.rejected) / static_cast<double>(summary.issued);
    bool ok = check(summary.issued >= 10000,
                    "only " + std::to_string(summary.issued) + " requests issued");
    ok &= check(rejection_rate < 0.01, "rejection rate " + std::to_string(rejection_rate));

    // Pick frequency for a {1,5} capacity pair.
    RngStream rng(11, 1);
    const std::vector<KnownWorker> pair = {{1, 1.0}, {2, 5.0}};
    int picked_big = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        if (weighted_pick_index(pair, [](const KnownWorker& w) { return w.capacity; }, rng) == 1) {
            ++picked_big;
        }
    }
    const double freq = static_cast<double>(picked_big) / trials;
    ok &= check(std::abs(freq - 5.0 / 6.0) <= 0.009,
                "weighted pick frequency " + std::to_string(freq));

    std::ostringstream detail;
    detail << summary.issued << " requests, rejection rate " << rejection_rate
           << ", pick frequency " << freq;
    const std::string issues = drain_notes();
    report(7, "load balancing", ok, issues.empty() ? detail.str() : issues);
}

// --- criterion 8: determinism ----------------------------------------------

void criterion_determinism() {
    const Scenario scenario = Scenario::default_experiment();

    Simulation first(scenario, scenario.run.seed);
    first.run();
    const std::string csv_a = csv_string(scenario, first.samples());
    const bool connected_a = first.summary().overlay_always_connected;

    Simulation second(scenario, scenario.run.seed);
    second.run();
    const std::string csv_b = csv_string(scenario, second.samples());

    bool ok = check(csv_a == csv_b, "CSV outputs differ between identical runs");
    ok &= check(first.engine().dispatch_digest() == second.engine().dispatch_digest(),
                "dispatch logs differ between identical runs");
    ok &= check(connected_a, "overlay lost weak connectivity during the default run");

    std::ostringstream detail;
    detail << csv_a.size() << " CSV bytes, " << first.engine().dispatched() << " events";
    const std::string issues = drain_notes();
    report(8, "determinism", ok, issues.empty() ? detail.str() : issues);
}

}  // namespace

int main() {
    criterion_formulas();
    criterion_theorems();
    criterion_experiment();
    criterion_overlay();
    criterion_load_balancing();
    criterion_determinism();

    if (failures > 0) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
