#pragma once

#include <limits>
#include <string_view>
#include <variant>
#include <vector>

#include "tcdgp/types.hpp"

namespace tcdgp {

// Fused speed statistics for one tag and one cycle.
struct AggregateRecord {
    int segmentId = 0;
    int direction = +1;
    int cycleId = 0;
    int nodeCount = 0;
    double sumSpeed = 0.0;
    double minSpeed = std::numeric_limits<double>::infinity();
    double maxSpeed = -std::numeric_limits<double>::infinity();
    double generatedAt = 0.0;

    double meanSpeed() const {
        return nodeCount > 0 ? sumSpeed / nodeCount : std::numeric_limits<double>::quiet_NaN();
    }
    ClusterTag tag() const { return {segmentId, direction}; }
};

// One sensed sample with its provenance.
struct Reading {
    NodeId node = 0;
    double speed = 0.0;
    ClusterTag tag;
    double sampledAt = 0.0;
};

enum class MessageKind : std::uint8_t { Hello, CHNotify, Join, SlotAssign, TreeData, V2IAggregate, NodeReport };
enum class Medium : std::uint8_t { V2V, V2I };

std::string_view toString(MessageKind kind);

inline Medium mediumFor(MessageKind kind) {
    return (kind == MessageKind::V2IAggregate || kind == MessageKind::NodeReport) ? Medium::V2I
                                                                                  : Medium::V2V;
}

struct HelloPayload {
    Vec2 position = Vec2::Zero();
    double residualEnergy = 1.0;
    double distanceToBS = 0.0;
    NodeState state = NodeState::Sensing;
    ClusterTag tag;
    // Set when the sender headed this very tag in the previous cycle.
    bool incumbentHead = false;
};

struct CHNotifyPayload {
    ClusterTag tag;
    // true: announcement to the cluster; false: hand-over order to the successor.
    bool announce = true;
};

struct JoinPayload {
    ClusterTag tag;
};

struct SlotAssignPayload {
    int slot = 0;
    double slotStart = 0.0;
    double slotDuration = 0.0;
    NodeId parent = kNoNode;
    std::vector<NodeId> children;
    // Latest instant the node waits for its children before forwarding.
    double forwardBy = 0.0;
};

struct TreeDataPayload {
    AggregateRecord record;
    std::vector<Reading> readings;
};

struct V2IAggregatePayload {
    AggregateRecord record;
    std::vector<Reading> readings;
};

struct NodeReportPayload {
    Reading reading;
    Vec2 position = Vec2::Zero();
};

using Payload = std::variant<std::monostate, HelloPayload, CHNotifyPayload, JoinPayload,
                             SlotAssignPayload, TreeDataPayload, V2IAggregatePayload,
                             NodeReportPayload>;

struct Message {
    MessageKind kind = MessageKind::Hello;
    NodeId src = kNoNode;
    NodeId dst = kBroadcast;
    Medium medium = Medium::V2V;
    double sentAt = 0.0;
    int cycleId = 0;
    Payload payload;
};

Message makeMessage(MessageKind kind, NodeId src, NodeId dst, int cycleId, Payload payload);

}  // namespace tcdgp
