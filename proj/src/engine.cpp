#include "depas/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace depas {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(stream_id), hi(stream_id)};
    engine_.seed(seq);
}

double RngStream::uniform() {
    // 53 random mantissa bits -> [0, 1). Avoids the implementation-defined
    // behavior of std::uniform_real_distribution.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::exponential(double mean) {
    if (!(mean > 0.0)) {
        throw std::invalid_argument("exponential: mean must be positive, got " + std::to_string(mean));
    }
    // Inverse CDF on the survival side; log1p keeps small variates accurate.
    return -mean * std::log1p(-uniform());
}

RngFactory default_rng_factory() {
    return [](std::uint64_t seed, std::uint64_t stream_id) {
        return std::make_unique<RngStream>(seed, stream_id);
    };
}

void Engine::schedule(Event event) {
    if (event.fire_time < now_) {
        throw std::logic_error("schedule: event at t=" + std::to_string(event.fire_time) +
                               " lies in the past (clock is " + std::to_string(now_) + ")");
    }
    heap_.push_back(Pending{event.fire_time, next_seq_++, event.target, event.kind, std::move(event.action)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
}

void Engine::run_until(double end_time) {
    if (end_time < now_) {
        throw std::logic_error("run_until: end time " + std::to_string(end_time) +
                               " lies before the clock " + std::to_string(now_));
    }
    while (!heap_.empty() && heap_.front().fire_time <= end_time) {
        std::pop_heap(heap_.begin(), heap_.end(), Later{});
        Pending ev = std::move(heap_.back());
        heap_.pop_back();

        if (dispatched_any_ &&
            (ev.fire_time < last_time_ || (ev.fire_time == last_time_ && ev.seq < last_seq_))) {
            throw std::logic_error("dispatch order violation at t=" + std::to_string(ev.fire_time));
        }
        dispatched_any_ = true;
        last_time_ = ev.fire_time;
        last_seq_ = ev.seq;

        now_ = ev.fire_time;
        ++dispatched_;

        constexpr std::uint64_t kFnvPrime = 1099511628211ULL;
        digest_ = (digest_ ^ std::bit_cast<std::uint64_t>(ev.fire_time)) * kFnvPrime;
        digest_ = (digest_ ^ ev.target) * kFnvPrime;
        digest_ = (digest_ ^ ev.kind) * kFnvPrime;

        if (trace_) {
            trace_(DispatchRecord{ev.fire_time, ev.target, ev.kind});
        }
        ev.action();
    }
    now_ = end_time;
}

}  // namespace depas
