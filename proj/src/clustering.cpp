#include "tcdgp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace tcdgp {

MemberState memberState(const VehicleNode& v, const RoadGeometry& road) {
    return {v.id, v.position(road), v.residualEnergy};
}

std::vector<MemberState> memberStates(std::span<const VehicleNode> vehicles, const RoadGeometry& road) {
    std::vector<MemberState> out;
    out.reserve(vehicles.size());
    for (const auto& v : vehicles) out.push_back(memberState(v, road));
    return out;
}

std::optional<int> SlotSchedule::slotOf(NodeId node) const {
    for (const auto& e : entries) {
        if (e.node == node) return e.slot;
    }
    return std::nullopt;
}

bool Cluster::contains(NodeId id) const {
    return std::binary_search(memberIds.begin(), memberIds.end(), id);
}

void WeightParams::validate() const {
    if (wEnergy < 0 || wCenter < 0 || wBS < 0) {
        throw std::invalid_argument("weights: w_energy, w_center and w_bs must be >= 0");
    }
    if (std::abs(wEnergy + wCenter + wBS - 1.0) > 1e-9) {
        throw std::invalid_argument("weights: w_energy + w_center + w_bs must equal 1");
    }
}

namespace {

Eigen::AlignedBox2d boundsOf(std::span<const MemberState> nodes, const std::vector<std::size_t>& idx) {
    Eigen::AlignedBox2d box;
    for (std::size_t i : idx) box.extend(nodes[i].position);
    return box;
}

Cluster makeCluster(int id, std::span<const MemberState> nodes, const std::vector<std::size_t>& idx) {
    Cluster c;
    c.clusterId = id;
    c.tag = {id, +1};
    std::vector<MemberState> members;
    members.reserve(idx.size());
    for (std::size_t i : idx) {
        members.push_back(nodes[i]);
        c.memberIds.push_back(nodes[i].id);
    }
    std::sort(c.memberIds.begin(), c.memberIds.end());
    c.bounds = boundsOf(nodes, idx);
    c.headId = selectInitialCH(members);
    return c;
}

}  // namespace

std::vector<Cluster> splitNetwork(std::span<const MemberState> nodes, std::size_t targetClusters) {
    if (nodes.empty()) throw std::invalid_argument("splitNetwork: node set is empty");
    if (targetClusters < 1) throw std::invalid_argument("splitNetwork: target_clusters must be >= 1");
    if (targetClusters > nodes.size()) {
        throw std::invalid_argument("splitNetwork: target_clusters " + std::to_string(targetClusters) +
                                    " exceeds node count " + std::to_string(nodes.size()));
    }

    std::vector<std::vector<std::size_t>> groups(1);
    groups[0].resize(nodes.size());
    std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});

    while (groups.size() < targetClusters) {
        std::size_t pick = 0;
        for (std::size_t g = 1; g < groups.size(); ++g) {
            if (groups[g].size() > groups[pick].size()) pick = g;
        }
        auto& group = groups[pick];
        const Eigen::Vector2d extent = boundsOf(nodes, group).sizes();
        const int axis = extent.x() >= extent.y() ? 0 : 1;
        std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
            const double ca = nodes[a].position[axis];
            const double cb = nodes[b].position[axis];
            return ca != cb ? ca < cb : nodes[a].id < nodes[b].id;
        });
        const auto mid = group.begin() + static_cast<std::ptrdiff_t>(group.size() / 2);
        std::vector<std::size_t> right(mid, group.end());
        group.erase(mid, group.end());
        groups.insert(groups.begin() + static_cast<std::ptrdiff_t>(pick) + 1, std::move(right));
    }

    std::vector<Cluster> out;
    out.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) out.push_back(makeCluster(static_cast<int>(g), nodes, groups[g]));
    return out;
}

std::vector<Cluster> splitNetwork(std::span<const VehicleNode> nodes, std::size_t targetClusters,
                                  const RoadGeometry& road) {
    const auto states = memberStates(nodes, road);
    return splitNetwork(std::span<const MemberState>(states), targetClusters);
}

Vec2 centroid(std::span<const MemberState> members) {
    Vec2 sum = Vec2::Zero();
    for (const auto& m : members) sum += m.position;
    return members.empty() ? sum : Vec2(sum / static_cast<double>(members.size()));
}

NodeId selectInitialCH(std::span<const MemberState> members) {
    if (members.empty()) throw std::invalid_argument("selectInitialCH: empty cluster");
    const Vec2 c = centroid(members);
    const MemberState* best = &members.front();
    double bestDist = (best->position - c).squaredNorm();
    for (const auto& m : members.subspan(1)) {
        const double d = (m.position - c).squaredNorm();
        if (d < bestDist || (d == bestDist && m.id < best->id)) {
            best = &m;
            bestDist = d;
        }
    }
    return best->id;
}

NodeId selectInitialCH(const Cluster& cluster, std::span<const VehicleNode> vehicles,
                       const RoadGeometry& road) {
    std::vector<MemberState> members;
    for (const auto& v : vehicles) {
        if (cluster.contains(v.id)) members.push_back(memberState(v, road));
    }
    return selectInitialCH(members);
}

double computeWeight(const MemberState& node, std::span<const MemberState> cluster,
                     const RoadGeometry& road, const WeightParams& params) {
    if (cluster.empty()) throw std::invalid_argument("computeWeight: empty cluster");
    const bool member = std::any_of(cluster.begin(), cluster.end(), [&](const MemberState& m) { return m.id == node.id; });
    if (!member) throw std::invalid_argument("computeWeight: node " + std::to_string(node.id) + " is not in the cluster");

    const Vec2 c = centroid(cluster);
    double maxCenter = 0.0;
    for (const auto& m : cluster) maxCenter = std::max(maxCenter, (m.position - c).norm());
    const double centerTerm = maxCenter > 0 ? 1.0 - (node.position - c).norm() / maxCenter : 1.0;
    const double bsTerm = std::clamp(1.0 - (node.position - road.baseStation).norm() / road.diagonal(), 0.0, 1.0);
    const double energyTerm = std::clamp(node.residualEnergy, 0.0, 1.0);

    const double w = params.wEnergy * energyTerm + params.wCenter * centerTerm + params.wBS * bsTerm;
    return std::clamp(w, 0.0, 1.0);
}

std::optional<NodeId> joinCluster(std::span<const HeardNotify> heard) {
    if (heard.empty()) return std::nullopt;
    const HeardNotify* best = &heard.front();
    for (const auto& h : heard.subspan(1)) {
        if (h.receivedPower > best->receivedPower ||
            (h.receivedPower == best->receivedPower && h.headId < best->headId)) {
            best = &h;
        }
    }
    return best->headId;
}

SlotSchedule assignSlots(std::span<const NodeId> memberIds, NodeId headId, double gatDuration) {
    std::vector<NodeId> others;
    for (NodeId id : memberIds) {
        if (id != headId) others.push_back(id);
    }
    std::sort(others.begin(), others.end());
    SlotSchedule s;
    s.slotDuration = gatDuration / static_cast<double>(std::max<std::size_t>(others.size(), 1));
    for (std::size_t i = 0; i < others.size(); ++i) s.entries.push_back({others[i], static_cast<int>(i)});
    return s;
}

SlotSchedule assignSlots(const Cluster& cluster, double gatDuration) {
    return assignSlots(cluster.memberIds, cluster.headId, gatDuration);
}

RotationDecision rotateCH(NodeId headId, double headWeight, std::span<const WeightedMember> members) {
    const WeightedMember* best = nullptr;
    for (const auto& m : members) {
        if (m.id == headId) continue;
        if (!best || m.weight > best->weight || (m.weight == best->weight && m.id < best->id)) best = &m;
    }
    if (!best || headWeight > best->weight) return {headId, false};
    return {best->id, true};
}

RotationDecision rotateCH(const MemberState& head, std::span<const MemberState> members,
                          const RoadGeometry& road, const WeightParams& params) {
    std::vector<MemberState> cluster(members.begin(), members.end());
    if (std::none_of(cluster.begin(), cluster.end(), [&](const MemberState& m) { return m.id == head.id; })) {
        cluster.push_back(head);
    }
    std::vector<WeightedMember> weighted;
    for (const auto& m : members) {
        if (m.id != head.id) weighted.push_back({m.id, computeWeight(m, cluster, road, params)});
    }
    return rotateCH(head.id, computeWeight(head, cluster, road, params), weighted);
}

void NeighborTable::upsert(const NeighborEntry& entry) {
    const auto id = static_cast<std::size_t>(entry.neighborId);
    if (id >= slot_.size()) slot_.resize(id + 1, -1);
    if (slot_[id] >= 0) {
        rows_[static_cast<std::size_t>(slot_[id])] = entry;
        return;
    }
    slot_[id] = static_cast<std::int32_t>(rows_.size());
    rows_.push_back(entry);
}

void NeighborTable::evictOlderThan(double now, double maxAge) {
    std::erase_if(rows_, [&](const NeighborEntry& r) { return now - r.heardAt > maxAge; });
    std::fill(slot_.begin(), slot_.end(), -1);
    for (std::size_t i = 0; i < rows_.size(); ++i) slot_[static_cast<std::size_t>(rows_[i].neighborId)] = static_cast<std::int32_t>(i);
}

void NeighborTable::clear() {
    rows_.clear();
    slot_.clear();
}

const NeighborEntry* NeighborTable::find(NodeId id) const {
    const auto i = static_cast<std::size_t>(id);
    if (id < 0 || i >= slot_.size() || slot_[i] < 0) return nullptr;
    return &rows_[static_cast<std::size_t>(slot_[i])];
}

NeighborEntry* NeighborTable::mutableFind(NodeId id) {
    return const_cast<NeighborEntry*>(std::as_const(*this).find(id));
}

namespace {
void sortById(std::vector<const NeighborEntry*>& rows) {
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->neighborId < b->neighborId; });
}
}  // namespace

std::vector<const NeighborEntry*> NeighborTable::withTag(const ClusterTag& tag) const {
    std::vector<const NeighborEntry*> out;
    for (const auto& row : rows_) {
        if (row.tag == tag) out.push_back(&row);
    }
    sortById(out);
    return out;
}

std::vector<const NeighborEntry*> NeighborTable::sorted() const {
    std::vector<const NeighborEntry*> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) out.push_back(&row);
    sortById(out);
    return out;
}

void updateNeighborTable(NeighborTable& table, const Vec2& selfPosition, const Message& hello, double now) {
    if (hello.kind != MessageKind::Hello) throw std::invalid_argument("updateNeighborTable: not a Hello message");
    const auto& p = std::get<HelloPayload>(hello.payload);
    NeighborEntry e;
    e.neighborId = hello.src;
    e.residualEnergy = p.residualEnergy;
    e.distance = (p.position - selfPosition).norm();
    e.distanceToBS = p.distanceToBS;
    e.state = p.state;
    e.position = p.position;
    e.tag = p.tag;
    e.incumbentHead = p.incumbentHead;
    e.heardAt = now;
    table.upsert(e);
}

ClusterTag segmentTag(const VehicleNode& v, const RoadGeometry& road) {
    return {segmentOf(v.x, road), v.direction};
}

std::vector<Cluster> geographicClusters(std::span<const VehicleNode> vehicles, const RoadGeometry& road) {
    // Order: segment ascending, then +x before -x.
    auto key = [](const ClusterTag& t) { return std::pair{t.group, -t.direction}; };
    std::vector<std::pair<ClusterTag, std::vector<MemberState>>> groups;
    for (const auto& v : vehicles) {
        const ClusterTag tag = segmentTag(v, road);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == tag; });
        if (it == groups.end()) {
            groups.push_back({tag, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back(memberState(v, road));
    }
    std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) { return key(a.first) < key(b.first); });

    std::vector<Cluster> out;
    out.reserve(groups.size());
    for (auto& [tag, members] : groups) {
        Cluster c;
        c.clusterId = static_cast<int>(out.size());
        c.tag = tag;
        for (const auto& m : members) {
            c.memberIds.push_back(m.id);
            c.bounds.extend(m.position);
        }
        std::sort(c.memberIds.begin(), c.memberIds.end());
        c.headId = selectInitialCH(members);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace tcdgp
