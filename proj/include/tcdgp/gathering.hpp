#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "tcdgp/clustering.hpp"
#include "tcdgp/engine.hpp"
#include "tcdgp/messages.hpp"
#include "tcdgp/radio.hpp"

namespace tcdgp {

// Per-cycle phase timers. AGG is nested at the tail of GAT: the head stops
// accepting tree data at GAT end and uplinks AGG later, inside DIS.
struct CycleTimers {
    double fullDuration = 5.0;
    double chdDuration = 1.0;
    double gatDuration = 3.0;
    double aggDuration = 0.1;
    double disDuration = 1.0;
    double validityWindow = 5.0;

    void validate() const;

    double gatStart(double cycleStart) const { return cycleStart + chdDuration; }
    double foldDeadline(double cycleStart) const { return cycleStart + chdDuration + gatDuration; }
    double disseminateAt(double cycleStart) const { return foldDeadline(cycleStart) + aggDuration; }
    double disEnd(double cycleStart) const { return foldDeadline(cycleStart) + disDuration; }
};

struct SpanningTree {
    NodeId rootId = kNoNode;
    std::map<NodeId, NodeId> parentOf;  // every non-root member
    std::vector<NodeId> excluded;       // members not reachable from the root

    std::vector<NodeId> members() const;  // root first, then ascending
    std::vector<NodeId> childrenOf(NodeId id) const;
    std::size_t size() const { return parentOf.size() + (rootId == kNoNode ? 0 : 1); }
    int depthOf(NodeId id) const;
};

// Squared Euclidean distance, the transmission-energy proxy.
double edgeWeight(const Vec2& a, const Vec2& b);

// Prim's algorithm rooted at the head over the unit-disk graph. Among equal
// weights the edge with the lower (min id, max id) pair is taken first.
// Nodes the root cannot reach end up in `excluded`.
SpanningTree buildMST(std::span<const MemberState> members, NodeId headId, const RadioConfig& radio);
SpanningTree buildMST(const Cluster& cluster, std::span<const VehicleNode> vehicles,
                      const RoadGeometry& road, const RadioConfig& radio);

// Star rooted at the head over every other member. Used when readings go to
// the head in one hop.
SpanningTree buildStar(std::span<const NodeId> memberIds, NodeId headId);

double treeWeight(const SpanningTree& tree, std::span<const MemberState> members);

// Timestamp, area and direction filter applied to incoming tree data.
bool shouldDrop(const Message& treeData, int segmentId, int direction, double now, const CycleTimers& timers);

// Fuses the node's own reading with already-filtered child aggregates.
AggregateRecord fuse(const Reading& own, std::span<const AggregateRecord> children);
void fuseInto(AggregateRecord& into, const AggregateRecord& child);

// Planned transmit instants inside GAT: leaves at the start of their TDMA
// slot, interior nodes as soon as the last child's frame has arrived.
std::map<NodeId, double> planTransmitTimes(const SpanningTree& tree, const SlotSchedule& slots,
                                           double gatStart, double hopDelay);

struct GatherRole {
    NodeId parent = kNoNode;
    std::vector<NodeId> children;
    int slot = 0;
    double slotStart = 0.0;
    double forwardBy = 0.0;
};

// Loss and traffic counters for one (cycle, tag).
struct GatherStats {
    int treeDataSent = 0;
    int treeDataAccepted = 0;
    int lostReadings = 0;      // frames that never reached their receiver
    int filteredReadings = 0;  // rejected by shouldDrop
    int lateReadings = 0;      // arrived after the receiver had moved on
    std::vector<double> acceptedDeliveryTimes;

    int drops() const { return lostReadings + filteredReadings + lateReadings; }
};

// Convergecast machinery shared by the full protocol and the standalone
// gather cycle. The owner routes TreeData deliveries into onTreeData().
class TreeGatherer {
public:
    using FoldCallback = std::function<void(NodeId head, const AggregateRecord&, const std::vector<Reading>&)>;

    TreeGatherer(Engine& engine, RadioMedium& medium, const CycleTimers& timers)
        : engine_(engine), medium_(medium), timers_(timers) {}

    void armMember(NodeId node, int cycleId, const Reading& own, const GatherRole& role);
    // The head folds at `deadline`; onFold fires at deadline + AGG.
    void armHead(NodeId head, int cycleId, const Reading& own, std::vector<NodeId> children,
                 double deadline, FoldCallback onFold);

    void onTreeData(NodeId receiver, const Message& msg);

    GatherStats& stats(int cycleId, const ClusterTag& tag) { return stats_[{cycleId, tag}]; }
    const std::map<std::pair<int, ClusterTag>, GatherStats>& allStats() const { return stats_; }

    static constexpr double kForwardGuard = 1e-6;

private:
    struct NodeState {
        int cycleId = -1;
        bool isHead = false;
        bool done = false;
        NodeId parent = kNoNode;
        std::set<NodeId> pending;
        Reading own;
        std::vector<AggregateRecord> childRecords;
        std::vector<Reading> readings;
        FoldCallback onFold;
    };

    void transmit(NodeId node);
    void fold(NodeId head);

    Engine& engine_;
    RadioMedium& medium_;
    const CycleTimers& timers_;
    std::unordered_map<NodeId, NodeState> nodes_;
    std::map<std::pair<int, ClusterTag>, GatherStats> stats_;
};

struct GatherResult {
    AggregateRecord record;
    std::vector<Reading> readings;
    GatherStats stats;
};

// Runs one isolated GAT+AGG phase for a cluster whose tree is already built.
// Member readings are the vehicles' current speeds. `now` is the GAT start.
GatherResult runGatherCycle(const Cluster& cluster, const SpanningTree& tree,
                            std::vector<VehicleNode> vehicles, const RoadGeometry& road,
                            const RadioConfig& radio, const CycleTimers& timers, double now,
                            int cycleId = 0);

// Base-station side record store.
class BaseStation {
public:
    struct Entry {
        AggregateRecord record;
        std::vector<Reading> readings;
        double receivedAt = 0.0;
    };

    void onMessage(const Message& msg, double now);
    const std::map<std::pair<int, ClusterTag>, Entry>& records() const { return store_; }
    std::vector<AggregateRecord> cycleRecords(int cycleId) const;

private:
    std::map<std::pair<int, ClusterTag>, Entry> store_;
};

// Uplinks the head's record for the cycle.
Delivery disseminate(RadioMedium& medium, NodeId head, const AggregateRecord& record,
                     std::vector<Reading> readings);

struct SegmentSummary {
    ClusterTag tag;
    int nodeCount = 0;
    double meanSpeed = 0.0;
};

struct RoadSummary {
    std::vector<SegmentSummary> segments;
    int vehicleCount = 0;
    double meanSpeed = 0.0;  // NaN when no records
};

// Count-weighted means per tag and over the whole road.
RoadSummary providerAggregate(std::span<const AggregateRecord> records);

}  // namespace tcdgp
