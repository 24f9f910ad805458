#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tcdgp/metrics.hpp"

namespace tcdgp {

enum class EventKind : std::uint8_t {
    Generic,
    CycleStart,
    MobilityStep,
    Delivery,
    Phase,
    Transmit,
    Report,
};

std::string_view toString(EventKind kind);

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Generic;
    std::function<void()> action;
};

struct DispatchRecord {
    double time;
    std::uint64_t seq;
    EventKind kind;

    friend bool operator==(const DispatchRecord&, const DispatchRecord&) = default;
};

// Single-threaded discrete-event loop. Events are dispatched in (time, seq)
// order; seq is the insertion counter so simultaneous events keep FIFO order.
class Engine {
public:
    explicit Engine(double horizon = 600.0, double start = 0.0) : now_(start), horizon_(horizon) {}

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    // Throws std::logic_error when time < now(). Returns the assigned seq.
    std::uint64_t schedule(double time, EventKind kind, std::function<void()> action);

    // Dispatches every queued event with time <= until (capped at the horizon).
    const Metrics& run(double until);

    double now() const { return now_; }
    double horizon() const { return horizon_; }
    std::size_t pending() const { return queue_.size(); }

    Metrics& metrics() { return metrics_; }
    const Metrics& metrics() const { return metrics_; }

    void recordDispatchLog(bool enabled) { logEnabled_ = enabled; }
    const std::vector<DispatchRecord>& dispatchLog() const { return log_; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    double now_ = 0.0;
    double horizon_;
    std::uint64_t nextSeq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    Metrics metrics_;
    bool logEnabled_ = false;
    std::vector<DispatchRecord> log_;
};

using StreamId = std::uint32_t;

// Named, independently seeded random streams. A stream must be registered
// before it is drawn from.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed) {}

    StreamId registerStream(std::string_view name);

    // Uniform in [0, 1). Throws std::out_of_range for an unregistered id.
    double next(StreamId stream);
    double uniform(StreamId stream, double lo, double hi) { return lo + (hi - lo) * next(stream); }

    std::uint64_t seed() const { return seed_; }

private:
    struct Stream {
        std::string name;
        std::mt19937_64 engine;
    };

    std::uint64_t seed_;
    std::vector<Stream> streams_;
};

}  // namespace tcdgp
