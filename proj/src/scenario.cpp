#include "tcdgp/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tcdgp {

void GroundTruth::record(int cycle, double freezeTime, const ClusterTag& tag, double speed) {
    freezeTimes_[cycle] = freezeTime;
    auto& [count, sum] = groups_[{cycle, tag}];
    ++count;
    sum += speed;
}

std::optional<double> GroundTruth::meanForCycle(int cycle, const ClusterTag& tag) const {
    auto it = groups_.find({cycle, tag});
    if (it == groups_.end() || it->second.first == 0) return std::nullopt;
    return it->second.second / it->second.first;
}

int GroundTruth::countForCycle(int cycle, const ClusterTag& tag) const {
    auto it = groups_.find({cycle, tag});
    return it == groups_.end() ? 0 : it->second.first;
}

std::optional<double> GroundTruth::mean(const ClusterTag& tag, double atTime) const {
    std::optional<int> cycle;
    for (const auto& [c, t] : freezeTimes_) {
        if (t <= atTime) cycle = c;
    }
    if (!cycle) return std::nullopt;
    return meanForCycle(*cycle, tag);
}

double CycleRow::absError() const {
    return hasAggregate ? std::abs(meanSpeed - truthMean) : std::numeric_limits<double>::quiet_NaN();
}

namespace {

struct World {
    explicit World(const SimConfig& cfg)
        : engine(cfg.duration), rng(cfg.seed), mobilityStream(rng.registerStream("mobility")),
          protocolStream(rng.registerStream("protocol")),
          vehicles(initVehicles(cfg.geometry, cfg.nodeCount, rng, mobilityStream, cfg.mobility)),
          medium(engine, cfg.radio, cfg.geometry, vehicles) {}

    Engine engine;
    RandomSource rng;
    StreamId mobilityStream;
    StreamId protocolStream;
    std::vector<VehicleNode> vehicles;
    RadioMedium medium;
    BaseStation baseStation;
    GroundTruth truth;
};

// Queues every step up front, ahead of any protocol event. At equal times
// vehicles move first and observers see the post-step state.
void scheduleMobility(World& w, const SimConfig& cfg) {
    const double dt = cfg.mobility.dt;
    const auto steps = static_cast<long>(std::floor(cfg.duration / dt + 1e-9));
    for (long k = 1; k <= steps; ++k) {
        w.engine.schedule(k * dt, EventKind::MobilityStep, [&w, &cfg, dt] {
            stepMobility(w.vehicles, cfg.geometry, dt, w.rng, w.mobilityStream, cfg.mobility);
        });
    }
}

void finishReport(RunReport& report, const World& w, const std::function<int(int, const ClusterTag&)>& drops) {
    report.metrics = w.engine.metrics();
    const auto& store = w.baseStation.records();
    for (const auto& [key, cs] : w.truth.groups()) {
        CycleRow row;
        row.cycle = key.first;
        row.tag = key.second;
        row.truthCount = cs.first;
        row.truthMean = cs.second / cs.first;
        if (auto it = store.find(key); it != store.end()) {
            row.hasAggregate = true;
            row.count = it->second.record.nodeCount;
            row.meanSpeed = it->second.record.meanSpeed();
            report.deliveredReadings[key] = it->second.readings;
        }
        // Readings can also vanish untracked, e.g. a chain still in flight at the horizon.
        const int missing = row.truthCount - (row.hasAggregate ? row.count : 0);
        row.drops = std::max(drops(key.first, key.second), missing);
        if (row.hasAggregate) {
            report.metrics.aggregateErrors.push_back({row.cycle, row.tag.group, row.tag.direction, row.absError()});
        }
        report.rows.push_back(row);
        ++report.occupiedClusters[key.first];
    }
    for (const auto& [cycle, t] : w.truth.freezeTimes()) {
        const auto records = w.baseStation.cycleRecords(cycle);
        report.summaries.push_back({cycle, providerAggregate(records)});
    }
}

RunReport finalize(RunReport report, std::chrono::steady_clock::time_point started) {
    report.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

RunReport runClustered(const SimConfig& config, TreeShape shape) {
    const auto started = std::chrono::steady_clock::now();
    config.validate();
    RunReport report;
    report.config = config;

    World w(config);
    TcdgpProtocol protocol(w.engine, w.medium, w.vehicles, config, shape);
    w.medium.setV2VReceiver([&](NodeId r, const Message& m) { protocol.onV2V(r, m); });
    w.medium.setBaseStationReceiver([&](const Message& m) {
        ++w.engine.metrics().deliveredAggregates;
        report.v2iDeliveryTimes.push_back(w.engine.now());
        w.baseStation.onMessage(m, w.engine.now());
    });
    scheduleMobility(w, config);
    protocol.scheduleCycles();
    // Oracle snapshot right after each freeze, from the true vehicle state.
    for (const auto& [cycle, t0] : cycleStarts(config)) {
        w.engine.schedule(t0, EventKind::CycleStart, [&w, &config, cycle = cycle] {
            const auto tags = assignTags(w.vehicles, config);
            for (const auto& v : w.vehicles) w.truth.record(cycle, w.engine.now(), tags[v.id], v.speed);
        });
    }
    w.engine.run(config.duration);

    finishReport(report, w, [&](int c, const ClusterTag& t) { return protocol.dropsFor(c, t); });
    report.clusterTraces = protocol.traces();
    report.gatherStats = protocol.gatherer().allStats();
    return finalize(std::move(report), started);
}

}  // namespace

RunReport runScenario1(const SimConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    config.validate();
    RunReport report;
    report.config = config;

    World w(config);
    w.medium.setBaseStationReceiver([&](const Message& m) {
        report.v2iDeliveryTimes.push_back(w.engine.now());
        w.baseStation.onMessage(m, w.engine.now());
    });

    scheduleMobility(w, config);
    // One report per node at the start of each full period.
    const auto periods = static_cast<int>(std::floor(config.duration / config.reportPeriod + 1e-9));
    for (int cycle = 0; cycle < periods; ++cycle) {
        w.engine.schedule(cycle * config.reportPeriod, EventKind::Report, [&w, &config, cycle] {
            const double now = w.engine.now();
            for (auto& v : w.vehicles) {
                const ClusterTag tag = segmentTag(v, config.geometry);
                v.currentReading = v.speed;
                w.truth.record(cycle, now, tag, v.speed);
                NodeReportPayload p{Reading{v.id, v.speed, tag, now}, v.position(config.geometry)};
                w.medium.sendToBaseStation(makeMessage(MessageKind::NodeReport, v.id, kBaseStation, cycle, p));
            }
        });
    }
    w.engine.run(config.duration);
    finishReport(report, w, [](int, const ClusterTag&) { return 0; });
    return finalize(std::move(report), started);
}

RunReport runScenario2(const SimConfig& config) { return runClustered(config, TreeShape::Star); }
RunReport runScenario3(const SimConfig& config) { return runClustered(config, TreeShape::MinimumSpanning); }

RunReport runScenario(const SimConfig& config) {
    switch (config.scenario) {
        case Scenario::PerNode: return runScenario1(config);
        case Scenario::PerClusterHead: return runScenario2(config);
        case Scenario::FullTCDGP: return runScenario3(config);
    }
    throw std::invalid_argument("unknown scenario");
}

}  // namespace tcdgp
