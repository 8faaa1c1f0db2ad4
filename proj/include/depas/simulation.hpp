#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>

#include "depas/engine.hpp"
#include "depas/metrics.hpp"
#include "depas/monitoring.hpp"
#include "depas/overlay.hpp"
#include "depas/scaler.hpp"
#include "depas/scenario.hpp"
#include "depas/traffic.hpp"
#include "depas/worker.hpp"

namespace depas {

// Event discriminators, recorded in the engine dispatch log.
enum EventKind : std::uint32_t {
    kEventArrival = 1,
    kEventCompletion,
    kEventGossip,
    kEventScalerCycle,
    kEventReshuffle,
    kEventSample,
};

struct OldestRequestFirst {
    bool operator()(const Request& a, const Request& b) const {
        if (a.issue_time != b.issue_time) return a.issue_time > b.issue_time;
        return a.id > b.id;
    }
};

struct WorkerNode {
    NodeId id = 0;
    std::size_t type_index = 0;
    double capacity = 0.0;
    double born = 0.0;
    bool draining = false;

    View view;
    std::unique_ptr<RngStream> rng;

    std::priority_queue<Request, std::vector<Request>, OldestRequestFirst> queue;
    int busy_slots = 0;

    SlidingLoadWindow window;
    std::optional<double> estimate;

    std::uint64_t completed_total = 0;
    std::uint64_t rejected_total = 0;
    std::uint64_t forwarded_total = 0;
};

struct RunSummary {
    std::uint64_t issued = 0;
    std::uint64_t completed = 0;
    std::uint64_t rejected = 0;
    std::uint64_t rejected_entry_empty = 0;  // no worker known to the entry point
    std::uint64_t rejected_entry_stale = 0;  // both dispatch attempts hit departed workers
    std::uint64_t rejected_isolation = 0;    // forward needed but the view had no live target
    std::uint64_t rejected_hop_limit = 0;
    std::uint64_t stale_entry_evictions = 0;
    std::uint64_t suppressed_removals = 0;
    std::uint64_t isolated_gossip_cycles = 0;
    std::uint64_t failed_gossip_contacts = 0;
    std::uint64_t nodes_created = 0;
    std::uint64_t nodes_removed = 0;
    int max_hops_observed = 0;
    bool overlay_always_connected = true;

    std::uint64_t in_flight() const { return issued - completed - rejected; }
};

// One deterministic run: a single client, a single entry point, and the
// worker population, all driven by the event engine.
class Simulation {
public:
    Simulation(Scenario scenario, std::uint64_t seed, RngFactory rng_factory = default_rng_factory());

    // Event actions capture `this`; the simulation must stay put.
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    // Runs to the horizon, sampling metrics every sample_period.
    void run();

    // Continues past the horizon without issuing requests or sampling; lets
    // in-flight work drain for conservation checks.
    void run_extra(double seconds);

    const std::vector<MetricsRecord>& samples() const { return samples_; }
    const RunSummary& summary() const { return summary_; }
    const Scenario& scenario() const { return scenario_; }
    Engine& engine() { return engine_; }

    const std::map<NodeId, WorkerNode>& workers() const { return workers_; }
    std::size_t live_worker_count() const { return live_workers_; }
    double live_capacity() const { return live_capacity_; }
    const std::vector<KnownWorker>& entry_view() const { return entry_view_; }

    // Exact capacity-weighted load over live workers' latest window samples.
    double true_load_now() const;

    // Graceful departure: the node stops accepting and gossiping, drains its
    // backlog, then leaves. Capacity leaves the accounting immediately.
    void request_removal(NodeId node);

    // Hard failure for experiments: the node vanishes along with any queued
    // work (conservation accounting does not cover crashed requests).
    void crash_worker(NodeId node);

    // Inject a request directly at a worker, as a forwarding peer would.
    void deliver(NodeId node, Request request);

    // Test probe.
    void set_completion_probe(std::function<void(NodeId, const Request&)> probe) {
        completion_probe_ = std::move(probe);
    }

private:
    static constexpr NodeId kClientId = 1;
    static constexpr NodeId kEntryPointId = 2;
    static constexpr std::uint64_t kBootstrapStreamId = 3;
    static constexpr NodeId kFirstWorkerId = 10;

    void setup();
    void create_worker(std::size_t type_index, const WorkerNode* creator);
    NeighborDescriptor fresh_descriptor(const WorkerNode& node) const;
    void recompute_estimate(WorkerNode& node);

    void handle_arrival();
    void entry_dispatch(Request request);
    void deliver_internal(WorkerNode& node, Request request);
    void start_executions(WorkerNode& node);
    void handle_completion(NodeId node, Request request);
    void handle_gossip(NodeId node);
    void handle_scaler_cycle(NodeId node);
    void handle_reshuffle();
    void handle_sample();
    void begin_drain(WorkerNode& node);
    void finalize_removal(NodeId node);
    void reject_at(WorkerNode& node);
    bool overlay_weakly_connected() const;

    void schedule_for(NodeId target, std::uint32_t kind, double at, std::function<void()> action);

    Scenario scenario_;
    std::uint64_t seed_;
    RngFactory rng_factory_;
    Engine engine_;

    std::map<NodeId, WorkerNode> workers_;
    std::size_t live_workers_ = 0;
    double live_capacity_ = 0.0;
    NodeId next_worker_id_ = kFirstWorkerId;
    std::uint64_t next_request_id_ = 0;

    std::unique_ptr<RngStream> client_rng_;
    std::unique_ptr<RngStream> entry_rng_;
    std::vector<KnownWorker> entry_view_;

    std::vector<MetricsRecord> samples_;
    std::uint64_t sample_index_ = 0;
    std::uint64_t completed_since_sample_ = 0;
    std::uint64_t rejected_since_sample_ = 0;

    RunSummary summary_;
    bool ran_ = false;

    std::function<void(NodeId, const Request&)> completion_probe_;
};

// Convenience wrappers used by the CLI and tests.
std::vector<MetricsRecord> run_scenario(const Scenario& scenario, std::uint64_t seed);

// Runs seeds base_seed .. base_seed+runs-1 (concurrently; runs share nothing)
// and aggregates the aligned series.
AggregateSeries aggregate_runs(const Scenario& scenario, int runs, std::uint64_t base_seed);

}  // namespace depas
