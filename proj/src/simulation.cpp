#include "depas/simulation.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace depas {

Simulation::Simulation(Scenario scenario, std::uint64_t seed, RngFactory rng_factory)
    : scenario_(std::move(scenario)), seed_(seed), rng_factory_(std::move(rng_factory)) {
    scenario_.validate();
    setup();
}

void Simulation::schedule_for(NodeId target, std::uint32_t kind, double at, std::function<void()> action) {
    engine_.schedule(Event{at, target, kind, std::move(action)});
}

NeighborDescriptor Simulation::fresh_descriptor(const WorkerNode& node) const {
    const auto load = node.window.load(engine_.now(), node.capacity);
    return NeighborDescriptor{node.id, node.capacity, 0, load.value_or(0.0), load.has_value()};
}

void Simulation::recompute_estimate(WorkerNode& node) {
    const auto own = node.window.load(engine_.now(), node.capacity);
    if (!own.has_value()) {
        return;  // no own measurement yet
    }
    node.estimate = estimate_system_load(*own, node.capacity, node.view.entries());
}

void Simulation::create_worker(std::size_t type_index, const WorkerNode* creator) {
    const NodeId id = next_worker_id_++;
    const double now = engine_.now();

    WorkerNode node;
    node.id = id;
    node.type_index = type_index;
    node.capacity = scenario_.types[type_index].capacity;
    node.born = now;
    node.window = SlidingLoadWindow(scenario_.monitoring_period, now);
    node.rng = rng_factory_(seed_, id);
    node.view = creator ? bootstrap_view(creator->view, fresh_descriptor(*creator), id, scenario_.overlay.degree)
                        : View(scenario_.overlay.degree);

    WorkerNode& stored = workers_.emplace(id, std::move(node)).first->second;
    ++live_workers_;
    live_capacity_ += scenario_.types[type_index].capacity;
    ++summary_.nodes_created;

    schedule_for(id, kEventGossip, now + scenario_.overlay.cycle_period, [this, id] { handle_gossip(id); });
    // Nodes run their decision cycle with an individual phase; nothing in the
    // system synchronizes them.
    const double phase = stored.rng->uniform() * scenario_.scaler.cycle_period;
    schedule_for(id, kEventScalerCycle, now + phase + scenario_.scaler.cycle_period,
                 [this, id] { handle_scaler_cycle(id); });
}

void Simulation::setup() {
    client_rng_ = rng_factory_(seed_, kClientId);
    entry_rng_ = rng_factory_(seed_, kEntryPointId);

    for (const auto& entry : scenario_.initial) {
        const std::size_t type_index = scenario_.type_index(entry.label);
        for (int i = 0; i < entry.count; ++i) {
            create_worker(type_index, nullptr);
        }
    }

    // Initial topology: every node starts from a uniform sample of the others.
    auto bootstrap_rng = rng_factory_(seed_, kBootstrapStreamId);
    std::vector<NodeId> ids;
    ids.reserve(workers_.size());
    for (const auto& [id, node] : workers_) {
        ids.push_back(id);
    }
    for (auto& [id, node] : workers_) {
        std::vector<NodeId> candidates;
        candidates.reserve(ids.size());
        for (const NodeId other : ids) {
            if (other != id) {
                candidates.push_back(other);
            }
        }
        const std::size_t want = std::min(scenario_.overlay.degree, candidates.size());
        for (std::size_t i = 0; i < want; ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(bootstrap_rng->uniform() *
                                             static_cast<double>(candidates.size() - i));
            std::swap(candidates[i], candidates[std::min(j, candidates.size() - 1)]);
            node.view.insert(NeighborDescriptor{candidates[i], workers_.at(candidates[i]).capacity, 0, 0.0, false},
                             id);
        }
    }

    handle_reshuffle();

    const double first = next_arrival_time(scenario_.track, 0.0, *client_rng_);
    if (first <= scenario_.run.horizon) {
        schedule_for(kClientId, kEventArrival, first, [this] { handle_arrival(); });
    }

    schedule_for(0, kEventSample, 0.0, [this] { handle_sample(); });
}

void Simulation::run() {
    if (ran_) {
        throw std::logic_error("Simulation::run: a run cannot be repeated");
    }
    ran_ = true;
    engine_.run_until(scenario_.run.horizon);
}

void Simulation::run_extra(double seconds) {
    engine_.run_until(engine_.now() + seconds);
}

void Simulation::handle_arrival() {
    const double now = engine_.now();
    Request request{next_request_id_++, now, 0};
    ++summary_.issued;
    entry_dispatch(request);

    const double next = next_arrival_time(scenario_.track, now, *client_rng_);
    if (next <= scenario_.run.horizon) {
        schedule_for(kClientId, kEventArrival, next, [this] { handle_arrival(); });
    }
}

void Simulation::entry_dispatch(Request request) {
    // A pick may hit a worker that departed since the last reshuffle; evict it
    // and retry once against the remaining view.
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (entry_view_.empty()) {
            ++summary_.rejected;
            ++rejected_since_sample_;
            ++summary_.rejected_entry_empty;
            return;
        }
        const std::size_t idx = weighted_pick_index(
            entry_view_, [](const KnownWorker& w) { return w.capacity; }, *entry_rng_);
        auto it = workers_.find(entry_view_[idx].node);
        if (it != workers_.end()) {
            deliver_internal(it->second, request);
            return;
        }
        entry_view_.erase(entry_view_.begin() + static_cast<std::ptrdiff_t>(idx));
        ++summary_.stale_entry_evictions;
    }
    ++summary_.rejected;
    ++rejected_since_sample_;
    ++summary_.rejected_entry_stale;
}

void Simulation::deliver(NodeId node, Request request) {
    auto it = workers_.find(node);
    if (it == workers_.end()) {
        throw std::invalid_argument("deliver: unknown worker");
    }
    ++summary_.issued;
    deliver_internal(it->second, request);
}

void Simulation::deliver_internal(WorkerNode& node, Request request) {
    WorkerNode* current = &node;
    for (;;) {
        summary_.max_hops_observed = std::max(summary_.max_hops_observed, request.hops);
        const AdmitAction action = admit_action(current->queue.size(), current->capacity, request.hops,
                                                !current->draining, scenario_.admission);
        if (action == AdmitAction::Enqueue) {
            current->queue.push(request);
            start_executions(*current);
            return;
        }
        if (action == AdmitAction::Reject) {
            ++summary_.rejected_hop_limit;
            reject_at(*current);
            return;
        }

        // Forward to a live neighbor, capacity-weighted like the entry point.
        std::vector<KnownWorker> candidates;
        candidates.reserve(current->view.size());
        for (const auto& d : current->view.entries()) {
            if (workers_.count(d.node) != 0) {
                candidates.push_back(KnownWorker{d.node, d.capacity});
            }
        }
        if (candidates.empty()) {
            ++summary_.rejected_isolation;
            reject_at(*current);
            return;
        }
        ++request.hops;
        ++current->forwarded_total;
        const std::size_t idx = weighted_pick_index(
            candidates, [](const KnownWorker& w) { return w.capacity; }, *current->rng);
        current = &workers_.at(candidates[idx].node);
    }
}

void Simulation::reject_at(WorkerNode& node) {
    ++node.rejected_total;
    node.window.record(engine_.now());
    ++summary_.rejected;
    ++rejected_since_sample_;
}

void Simulation::start_executions(WorkerNode& node) {
    const double now = engine_.now();
    while (node.busy_slots < static_cast<int>(node.capacity) && !node.queue.empty()) {
        const Request request = node.queue.top();
        node.queue.pop();
        ++node.busy_slots;
        const double done = now + node.rng->exponential(scenario_.admission.mean_execution_time);
        schedule_for(node.id, kEventCompletion, done,
                     [this, id = node.id, request] { handle_completion(id, request); });
    }
}

void Simulation::handle_completion(NodeId id, Request request) {
    auto it = workers_.find(id);
    if (it == workers_.end()) {
        return;  // the worker crashed; the request died with it
    }
    WorkerNode& node = it->second;
    --node.busy_slots;
    ++node.completed_total;
    node.window.record(engine_.now());
    ++summary_.completed;
    ++completed_since_sample_;
    if (completion_probe_) {
        completion_probe_(id, request);
    }
    start_executions(node);
    if (node.draining && node.busy_slots == 0 && node.queue.empty()) {
        finalize_removal(id);
    }
}

void Simulation::handle_gossip(NodeId id) {
    auto it = workers_.find(id);
    if (it == workers_.end() || it->second.draining) {
        return;  // departed nodes stop gossiping
    }
    WorkerNode& node = it->second;
    schedule_for(id, kEventGossip, engine_.now() + scenario_.overlay.cycle_period,
                 [this, id] { handle_gossip(id); });

    const auto partner_id = select_partner_oldest(node.view);
    if (!partner_id) {
        ++summary_.isolated_gossip_cycles;
        recompute_estimate(node);
        return;
    }
    auto pit = workers_.find(*partner_id);
    if (pit == workers_.end() || pit->second.draining) {
        // Contact failed; the link is dead. Drop it and let the cycle age out.
        node.view.erase(*partner_id);
        node.view.increment_ages();
        ++summary_.failed_gossip_contacts;
        recompute_estimate(node);
        return;
    }
    WorkerNode& partner = pit->second;
    gossip_exchange(node.id, node.view, fresh_descriptor(node), *node.rng, partner.id, partner.view,
                    fresh_descriptor(partner), *partner.rng, scenario_.overlay);
    recompute_estimate(node);
    recompute_estimate(partner);
}

void Simulation::handle_scaler_cycle(NodeId id) {
    auto it = workers_.find(id);
    if (it == workers_.end() || it->second.draining) {
        return;
    }
    WorkerNode& node = it->second;
    const double now = engine_.now();
    schedule_for(id, kEventScalerCycle, now + scenario_.scaler.cycle_period,
                 [this, id] { handle_scaler_cycle(id); });

    if (!scenario_.scaler.enabled) {
        return;
    }
    // Cold start: no decision before one full monitoring window of history.
    if (!node.window.has_full_window(now) || !node.estimate.has_value()) {
        return;
    }

    const ProvisioningEpoch& epoch = provisioning_at(scenario_.policy, now);
    const ScalingDecision decision =
        decide(*node.estimate, scenario_.scaler, node.capacity, epoch.capacity, *node.rng);

    switch (decision.kind) {
        case ScalingDecision::Kind::RemoveSelf:
            if (live_workers_ <= 1) {
                // Last live worker: an empty system could never observe load
                // again, so the removal is suppressed.
                ++summary_.suppressed_removals;
            } else {
                begin_drain(node);
            }
            return;
        case ScalingDecision::Kind::Add: {
            const std::size_t type_index = scenario_.type_index(epoch.type_label);
            for (int i = 0; i < decision.add_count; ++i) {
                create_worker(type_index, &node);
            }
            return;
        }
        case ScalingDecision::Kind::NoOp:
            return;
    }
}

void Simulation::begin_drain(WorkerNode& node) {
    node.draining = true;
    --live_workers_;
    live_capacity_ -= node.capacity;
    ++summary_.nodes_removed;
    if (node.busy_slots == 0 && node.queue.empty()) {
        finalize_removal(node.id);
    }
}

void Simulation::finalize_removal(NodeId id) {
    workers_.erase(id);
}

void Simulation::request_removal(NodeId id) {
    auto it = workers_.find(id);
    if (it == workers_.end() || it->second.draining) {
        return;
    }
    begin_drain(it->second);
}

void Simulation::crash_worker(NodeId id) {
    auto it = workers_.find(id);
    if (it == workers_.end()) {
        return;
    }
    if (!it->second.draining) {
        --live_workers_;
        live_capacity_ -= it->second.capacity;
        ++summary_.nodes_removed;
    }
    workers_.erase(it);
}

void Simulation::handle_reshuffle() {
    std::vector<KnownWorker> live;
    live.reserve(workers_.size());
    for (const auto& [id, node] : workers_) {
        if (!node.draining) {
            live.push_back(KnownWorker{id, node.capacity});
        }
    }
    entry_view_ = reshuffle_entry_view(std::move(live), scenario_.entry_point, *entry_rng_);
    schedule_for(kEntryPointId, kEventReshuffle, engine_.now() + scenario_.entry_point.reshuffle_period,
                 [this] { handle_reshuffle(); });
}

double Simulation::true_load_now() const {
    const double now = engine_.now();
    std::vector<std::pair<double, double>> loads;
    loads.reserve(workers_.size());
    for (const auto& [id, node] : workers_) {
        if (!node.draining) {
            loads.emplace_back(node.window.load(now, node.capacity).value_or(0.0), node.capacity);
        }
    }
    return loads.empty() ? 0.0 : true_system_load(loads);
}

bool Simulation::overlay_weakly_connected() const {
    std::vector<NodeId> live;
    live.reserve(workers_.size());
    for (const auto& [id, node] : workers_) {
        if (!node.draining) {
            live.push_back(id);
        }
    }
    // The connectivity requirement only applies while at least degree/2
    // workers are alive.
    if (live.size() < scenario_.overlay.degree / 2 || live.size() < 2) {
        return true;
    }

    std::unordered_map<NodeId, std::size_t> index;
    index.reserve(live.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
        index.emplace(live[i], i);
    }
    std::vector<std::size_t> parent(live.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (std::size_t i = 0; i < live.size(); ++i) {
        const WorkerNode& node = workers_.at(live[i]);
        for (const auto& d : node.view.entries()) {
            auto it = index.find(d.node);
            if (it != index.end()) {
                parent[find(i)] = find(it->second);
            }
        }
    }

    const std::size_t root = find(0);
    for (std::size_t i = 1; i < live.size(); ++i) {
        if (find(i) != root) {
            return false;
        }
    }
    return true;
}

void Simulation::handle_sample() {
    const double now = engine_.now();
    MetricsRecord record;
    record.time = now;
    record.n_per_type.assign(scenario_.types.size(), 0);
    for (const auto& [id, node] : workers_) {
        if (node.draining) {
            continue;
        }
        ++record.n_total;
        ++record.n_per_type[node.type_index];
        record.total_capacity += node.capacity;
    }
    record.true_load = true_load_now();
    record.offered_rate = scenario_.track.rate_at(now);
    const double desired = scenario_.scaler.desired_load;
    const double variation = scenario_.scaler.load_variation;
    record.c_opt_lo = optimal_capacity(record.offered_rate, desired + variation);
    record.c_opt_mid = optimal_capacity(record.offered_rate, desired);
    record.c_opt_hi = optimal_capacity(record.offered_rate, desired - variation);
    record.completed = completed_since_sample_;
    record.rejected = rejected_since_sample_;
    completed_since_sample_ = 0;
    rejected_since_sample_ = 0;
    record.issued_cumulative = summary_.issued;
    record.overlay_connected = overlay_weakly_connected();
    summary_.overlay_always_connected = summary_.overlay_always_connected && record.overlay_connected;
    samples_.push_back(std::move(record));

    ++sample_index_;
    const double next = scenario_.run.sample_period * static_cast<double>(sample_index_);
    if (next <= scenario_.run.horizon + 1e-9) {
        schedule_for(0, kEventSample, next, [this] { handle_sample(); });
    }
}

std::vector<MetricsRecord> run_scenario(const Scenario& scenario, std::uint64_t seed) {
    Simulation sim(scenario, seed);
    sim.run();
    return sim.samples();
}

AggregateSeries aggregate_runs(const Scenario& scenario, int runs, std::uint64_t base_seed) {
    if (runs < 1) {
        throw std::invalid_argument("aggregate_runs: need at least one run");
    }
    std::vector<std::future<std::vector<MetricsRecord>>> futures;
    futures.reserve(static_cast<std::size_t>(runs));
    for (int r = 0; r < runs; ++r) {
        futures.push_back(std::async(std::launch::async, [&scenario, seed = base_seed + static_cast<std::uint64_t>(r)] {
            return run_scenario(scenario, seed);
        }));
    }
    std::vector<std::vector<MetricsRecord>> series;
    series.reserve(futures.size());
    for (auto& future : futures) {
        series.push_back(future.get());
    }
    return aggregate_series(scenario, series);
}

}  // namespace depas
