#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "tcdgp/messages.hpp"
#include "tcdgp/mobility.hpp"
#include "tcdgp/radio.hpp"

namespace tcdgp {

// The subset of a vehicle's state the clustering rules look at.
struct MemberState {
    NodeId id = 0;
    Vec2 position = Vec2::Zero();
    double residualEnergy = 1.0;
};

MemberState memberState(const VehicleNode& v, const RoadGeometry& road);
std::vector<MemberState> memberStates(std::span<const VehicleNode> vehicles, const RoadGeometry& road);

struct SlotEntry {
    NodeId node = 0;
    int slot = 0;
    friend bool operator==(const SlotEntry&, const SlotEntry&) = default;
};

struct SlotSchedule {
    std::vector<SlotEntry> entries;
    double slotDuration = 0.0;

    std::optional<int> slotOf(NodeId node) const;
};

struct Cluster {
    int clusterId = 0;
    std::vector<NodeId> memberIds;  // ascending
    NodeId headId = kNoNode;
    ClusterTag tag;
    Eigen::AlignedBox2d bounds;
    SlotSchedule slotSchedule;

    bool contains(NodeId id) const;
};

struct WeightParams {
    double wEnergy = 0.5;
    double wCenter = 0.3;
    double wBS = 0.2;

    // Throws std::invalid_argument unless all weights are >= 0 and sum to 1.
    void validate() const;
};

// Recursive bisection: the largest cluster (ties: lowest index) is cut at the
// median of its longer bounding-box axis until targetClusters exist.
// Throws std::invalid_argument for an empty node set, targetClusters < 1, or
// targetClusters > node count.
std::vector<Cluster> splitNetwork(std::span<const MemberState> nodes, std::size_t targetClusters);
std::vector<Cluster> splitNetwork(std::span<const VehicleNode> nodes, std::size_t targetClusters,
                                  const RoadGeometry& road);

Vec2 centroid(std::span<const MemberState> members);

// Member closest to the centroid; ties go to the lower id.
// Throws std::invalid_argument for an empty cluster.
NodeId selectInitialCH(std::span<const MemberState> members);
NodeId selectInitialCH(const Cluster& cluster, std::span<const VehicleNode> vehicles,
                       const RoadGeometry& road);

// Convex combination of residual energy, closeness to the cluster centroid and
// closeness to the base station. Result lies in [0, 1].
// Throws std::invalid_argument when the cluster is empty or lacks the node.
double computeWeight(const MemberState& node, std::span<const MemberState> cluster,
                     const RoadGeometry& road, const WeightParams& params = {});

struct HeardNotify {
    NodeId headId = kNoNode;
    double receivedPower = 0.0;
};

// Strongest announcement wins, lower head id on ties. nullopt when nothing was
// heard; the caller books the node as unclustered for the cycle.
std::optional<NodeId> joinCluster(std::span<const HeardNotify> heard);

// Non-head members in ascending id order take slots 0..k-1.
SlotSchedule assignSlots(std::span<const NodeId> memberIds, NodeId headId, double gatDuration);
SlotSchedule assignSlots(const Cluster& cluster, double gatDuration);

struct WeightedMember {
    NodeId id = 0;
    double weight = 0.0;
};

struct RotationDecision {
    NodeId head = kNoNode;
    bool handedOver = false;
};

// The incumbent keeps the role only if its weight is strictly greater than the
// best member's (ties among members: lower id).
RotationDecision rotateCH(NodeId headId, double headWeight, std::span<const WeightedMember> members);
RotationDecision rotateCH(const MemberState& head, std::span<const MemberState> members,
                          const RoadGeometry& road, const WeightParams& params = {});

// One row of the neighbour table.
struct NeighborEntry {
    NodeId neighborId = 0;
    double residualEnergy = 1.0;
    double distance = 0.0;
    double distanceToBS = 0.0;
    NodeState state = NodeState::Sensing;
    double weight = 0.0;

    // Extra columns the election needs.
    Vec2 position = Vec2::Zero();
    ClusterTag tag;
    bool incumbentHead = false;
    double heardAt = 0.0;
};

class NeighborTable {
public:
    void upsert(const NeighborEntry& entry);
    // Removes rows whose age exceeds maxAge.
    void evictOlderThan(double now, double maxAge);
    const NeighborEntry* find(NodeId id) const;
    std::size_t size() const { return rows_.size(); }
    void clear();

    // Rows sharing a tag, ascending by neighbour id.
    std::vector<const NeighborEntry*> withTag(const ClusterTag& tag) const;
    std::vector<const NeighborEntry*> sorted() const;

    NeighborEntry* mutableFind(NodeId id);

private:
    std::vector<NeighborEntry> rows_;
    std::vector<std::int32_t> slot_;  // neighbour id -> index into rows_, -1 when absent
};

// Upserts the sender's advertised state. The weight column is left for the
// election to fill in against its cluster view; stale rows go at the next
// maintenance tick (NeighborTable::evictOlderThan).
void updateNeighborTable(NeighborTable& table, const Vec2& selfPosition, const Message& hello, double now);

// One cluster per occupied (segment, direction), ordered by segment then +x
// before -x. Heads are the centroid members.
std::vector<Cluster> geographicClusters(std::span<const VehicleNode> vehicles, const RoadGeometry& road);

ClusterTag segmentTag(const VehicleNode& v, const RoadGeometry& road);

}  // namespace tcdgp
