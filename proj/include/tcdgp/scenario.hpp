#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tcdgp/config.hpp"
#include "tcdgp/gathering.hpp"
#include "tcdgp/metrics.hpp"
#include "tcdgp/protocol.hpp"

namespace tcdgp {

// True speeds per (cycle, tag) at each cycle's freeze instant.
class GroundTruth {
public:
    void record(int cycle, double freezeTime, const ClusterTag& tag, double speed);

    // Mean true speed of the tag in the cycle enclosing atTime; nullopt for an
    // empty tag or a time before the first freeze.
    std::optional<double> mean(const ClusterTag& tag, double atTime) const;
    std::optional<double> meanForCycle(int cycle, const ClusterTag& tag) const;
    int countForCycle(int cycle, const ClusterTag& tag) const;

    const std::map<std::pair<int, ClusterTag>, std::pair<int, double>>& groups() const { return groups_; }
    const std::map<int, double>& freezeTimes() const { return freezeTimes_; }

private:
    std::map<int, double> freezeTimes_;
    std::map<std::pair<int, ClusterTag>, std::pair<int, double>> groups_;  // (count, sum)
};

struct CycleRow {
    int cycle = 0;
    ClusterTag tag;
    int truthCount = 0;
    double truthMean = 0.0;
    bool hasAggregate = false;
    int count = 0;
    double meanSpeed = 0.0;
    int drops = 0;

    double absError() const;
};

struct CycleSummary {
    int cycle = 0;
    RoadSummary road;
};

struct RunReport {
    SimConfig config;
    Metrics metrics;
    std::vector<CycleRow> rows;
    std::vector<CycleSummary> summaries;
    std::vector<ClusterCycleTrace> clusterTraces;
    std::map<int, int> occupiedClusters;         // per cycle
    std::vector<double> v2iDeliveryTimes;
    std::map<std::pair<int, ClusterTag>, GatherStats> gatherStats;
    std::map<std::pair<int, ClusterTag>, std::vector<Reading>> deliveredReadings;
    double wallSeconds = 0.0;  // never written to report files
};

RunReport runScenario1(const SimConfig& config);
RunReport runScenario2(const SimConfig& config);
RunReport runScenario3(const SimConfig& config);
RunReport runScenario(const SimConfig& config);

}  // namespace tcdgp
