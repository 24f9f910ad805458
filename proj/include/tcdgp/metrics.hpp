#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tcdgp {

struct AggregateError {
    int cycle = 0;
    int segment = 0;
    int direction = 0;
    double absError = 0.0;
    friend bool operator==(const AggregateError&, const AggregateError&) = default;
};

// Global counters for one run. Every field only ever grows.
struct Metrics {
    std::uint64_t v2iMessageCount = 0;
    std::uint64_t v2vMessageCount = 0;
    std::map<std::string, std::uint64_t> perKindCounts;
    std::vector<AggregateError> aggregateErrors;
    std::uint64_t deliveredAggregates = 0;

    // Loss accounting. A reading that should have reached its head but did not
    // lands in exactly one of these.
    std::uint64_t unclusteredNodeCycles = 0;
    std::uint64_t unreachableMembers = 0;
    std::uint64_t lostMessages = 0;
    std::uint64_t droppedReadings = 0;
    std::uint64_t lateReadings = 0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

}  // namespace tcdgp
