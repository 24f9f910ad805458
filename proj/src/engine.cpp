#include "tcdgp/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tcdgp {

std::string_view toString(EventKind kind) {
    switch (kind) {
        case EventKind::Generic: return "Generic";
        case EventKind::CycleStart: return "CycleStart";
        case EventKind::MobilityStep: return "MobilityStep";
        case EventKind::Delivery: return "Delivery";
        case EventKind::Phase: return "Phase";
        case EventKind::Transmit: return "Transmit";
        case EventKind::Report: return "Report";
    }
    return "Unknown";
}

std::uint64_t Engine::schedule(double time, EventKind kind, std::function<void()> action) {
    if (!(time >= now_)) {
        throw std::logic_error("Engine::schedule: event time " + std::to_string(time) +
                               " precedes current time " + std::to_string(now_));
    }
    const std::uint64_t seq = nextSeq_++;
    queue_.push(Event{time, seq, kind, std::move(action)});
    return seq;
}

const Metrics& Engine::run(double until) {
    const double stop = std::min(until, horizon_);
    while (!queue_.empty() && queue_.top().time <= stop) {
        // top() is const, so the event is copied out before pop().
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.time;
        if (logEnabled_) log_.push_back({ev.time, ev.seq, ev.kind});
        if (ev.action) ev.action();
    }
    return metrics_;
}

StreamId RandomSource::registerStream(std::string_view name) {
    for (StreamId i = 0; i < streams_.size(); ++i) {
        if (streams_[i].name == name) return i;
    }
    // Seed = run seed mixed with an FNV-1a hash of the stream name.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    streams_.push_back(Stream{std::string(name), std::mt19937_64(seq)});
    return static_cast<StreamId>(streams_.size() - 1);
}

double RandomSource::next(StreamId stream) {
    if (stream >= streams_.size()) {
        throw std::out_of_range("RandomSource: unknown stream id " + std::to_string(stream));
    }
    // 53 high bits -> [0, 1); never returns 1.0.
    return static_cast<double>(streams_[stream].engine() >> 11) * 0x1.0p-53;
}

}  // namespace tcdgp
