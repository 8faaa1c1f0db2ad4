#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace depas {

using NodeId = std::uint64_t;

// Deterministic variate stream. Two streams constructed from the same
// (seed, stream_id) pair yield identical sequences, so per-entity streams
// stay reproducible no matter when the entity was created.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);
    virtual ~RngStream() = default;

    // Next uniform variate in [0, 1). Virtual so tests can substitute a
    // counting stub and prove all entropy flows through streams.
    virtual double uniform();

    // Exponential variate with the given mean; throws std::invalid_argument
    // for mean <= 0. Derived from uniform(), so stubs cover it too.
    double exponential(double mean);

private:
    std::mt19937_64 engine_;
};

using RngFactory = std::function<std::unique_ptr<RngStream>(std::uint64_t seed, std::uint64_t stream_id)>;

RngFactory default_rng_factory();

struct Event {
    double fire_time = 0.0;
    NodeId target = 0;
    std::uint32_t kind = 0;
    std::function<void()> action;
};

struct DispatchRecord {
    double time = 0.0;
    NodeId target = 0;
    std::uint32_t kind = 0;
};

// Discrete-event scheduler with a virtual clock. Events fire strictly in
// (fire_time, insertion sequence) order; the clock never moves backwards.
class Engine {
public:
    double now() const { return now_; }

    // Throws std::logic_error if the event lies in the past.
    void schedule(Event event);

    // Dispatches every event with fire_time <= end_time, then sets the clock
    // to end_time. Throws std::logic_error if end_time is in the past.
    void run_until(double end_time);

    std::uint64_t dispatched() const { return dispatched_; }

    // Order-sensitive digest over every (time, target, kind) dispatched so
    // far; equal digests mean byte-identical dispatch logs.
    std::uint64_t dispatch_digest() const { return digest_; }

    void set_trace(std::function<void(const DispatchRecord&)> sink) { trace_ = std::move(sink); }

private:
    struct Pending {
        double fire_time;
        std::uint64_t seq;
        NodeId target;
        std::uint32_t kind;
        std::function<void()> action;
    };

    struct Later {
        bool operator()(const Pending& a, const Pending& b) const {
            if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
            return a.seq > b.seq;
        }
    };

    double now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t dispatched_ = 0;
    std::uint64_t digest_ = 14695981039346656037ULL;  // FNV-1a offset basis
    bool dispatched_any_ = false;
    double last_time_ = 0.0;
    std::uint64_t last_seq_ = 0;
    std::vector<Pending> heap_;
    std::function<void(const DispatchRecord&)> trace_;
};

}  // namespace depas
