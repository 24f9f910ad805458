#pragma once

#include <map>
#include <vector>

#include "tcdgp/clustering.hpp"
#include "tcdgp/config.hpp"
#include "tcdgp/engine.hpp"
#include "tcdgp/gathering.hpp"
#include "tcdgp/radio.hpp"

namespace tcdgp {

struct TagAssignment {
    std::vector<ClusterTag> tags;    // index == vehicle id
    std::vector<NodeId> designated;  // split mode: base-station chosen heads, ascending
};

// Gathering group of every vehicle (index == id) under the configured
// cluster-formation mode.
TagAssignment assignClusters(std::span<const VehicleNode> vehicles, const SimConfig& cfg);
std::vector<ClusterTag> assignTags(std::span<const VehicleNode> vehicles, const SimConfig& cfg);

// (cycle id, start time) of every full cycle that fits in the run.
std::vector<std::pair<int, double>> cycleStarts(const SimConfig& cfg);

enum class TreeShape { Star, MinimumSpanning };

// Per-cycle bookkeeping exposed for verification.
struct ClusterCycleTrace {
    int cycle = 0;
    ClusterTag tag;
    NodeId head = kNoNode;
    bool handedOver = false;
    int joined = 0;         // members whose Join reached the head, head excluded
    int treeSize = 0;       // head plus members holding a slot at CHD end
    int treeDataSent = 0;
    std::vector<NodeId> frozenMembers;
};

// Frozen per-(cycle, tag) snapshot taken at cycle start.
struct FrozenGroup {
    int count = 0;
    double sumSpeed = 0.0;
    std::vector<NodeId> members;

    double mean() const { return count > 0 ? sumSpeed / count : 0.0; }
};

// Drives CHD -> GAT -> AGG -> DIS every FULL_DURATION over a live vehicle table.
//   CHD: freeze, IS_PT, Hello round, election/rotation, CHNotify, Join,
//        SlotAssign carrying each member's tree role.
//   GAT: convergecast along the tree; AGG: fuse at the head; DIS: one uplink.
class TcdgpProtocol {
public:
    TcdgpProtocol(Engine& engine, RadioMedium& medium, std::vector<VehicleNode>& vehicles,
                  const SimConfig& cfg, TreeShape shape);

    // Schedules every cycle that fits in the run.
    void scheduleCycles();

    void onV2V(NodeId receiver, const Message& msg);

    const std::map<std::pair<int, ClusterTag>, FrozenGroup>& frozen() const { return frozen_; }
    const std::vector<ClusterCycleTrace>& traces() const;
    // Readings of the (cycle, tag) that never reached the head.
    int dropsFor(int cycle, const ClusterTag& tag) const;
    const TreeGatherer& gatherer() const { return gatherer_; }

    void setAggregateSink(TreeGatherer::FoldCallback sink) { sink_ = std::move(sink); }

private:
    struct NodeProto {
        NeighborTable table;
        ClusterTag tag;
        ClusterTag headedTag;
        bool headedLastCycle = false;
        bool incumbent = false;
        bool designated = false;
        bool isHead = false;
        std::vector<HeardNotify> heard;
        std::vector<NodeId> joiners;
        Reading reading;
        Vec2 helloPosition = Vec2::Zero();
    };

    void startCycle(int cycle);
    void helloRound();
    void election();
    void joinRound();
    void slotRound();
    void becomeHead(NodeId id, bool announce);
    std::vector<MemberState> viewOf(NodeId id) const;

    Engine& engine_;
    RadioMedium& medium_;
    std::vector<VehicleNode>& vehicles_;
    const SimConfig& cfg_;
    TreeShape shape_;
    TreeGatherer gatherer_;
    TreeGatherer::FoldCallback sink_;

    std::vector<NodeProto> proto_;
    int cycle_ = -1;
    double cycleStart_ = 0.0;
    std::map<std::pair<int, ClusterTag>, FrozenGroup> frozen_;
    std::map<std::pair<int, ClusterTag>, int> protocolDrops_;
    std::map<std::pair<int, ClusterTag>, ClusterCycleTrace> traces_;
    mutable std::vector<ClusterCycleTrace> traceList_;
};

}  // namespace tcdgp
