#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include <Eigen/Core>

namespace tcdgp {

using NodeId = std::int32_t;
using Vec2 = Eigen::Vector2d;

inline constexpr NodeId kBroadcast = -1;
inline constexpr NodeId kBaseStation = -2;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::min();

enum class NodeState : std::uint8_t { Sensing, ClusterHead };

inline std::string_view toString(NodeState s) {
    return s == NodeState::ClusterHead ? "ClusterHead" : "Sensing";
}

// Identifies a gathering group: a road segment (or split cluster) plus travel
// direction. Readings are only ever fused inside one tag.
struct ClusterTag {
    int group = 0;
    int direction = +1;

    friend bool operator==(const ClusterTag&, const ClusterTag&) = default;
    friend auto operator<=>(const ClusterTag&, const ClusterTag&) = default;
};

}  // namespace tcdgp
