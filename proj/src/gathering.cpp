#include "tcdgp/gathering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace tcdgp {

void CycleTimers::validate() const {
    auto positive = [](double v, const char* field) {
        if (!(v > 0)) throw std::invalid_argument(std::string("timers.") + field + ": must be positive");
    };
    positive(fullDuration, "full_duration");
    positive(chdDuration, "chd_duration");
    positive(gatDuration, "gat_duration");
    positive(aggDuration, "agg_duration");
    positive(disDuration, "dis_duration");
    positive(validityWindow, "validity_window");
    if (chdDuration + gatDuration + disDuration > fullDuration + 1e-9) {
        throw std::invalid_argument("timers.full_duration: CHD + GAT + DIS must fit in one cycle");
    }
    if (aggDuration >= disDuration) {
        throw std::invalid_argument("timers.agg_duration: must be shorter than DIS");
    }
}

std::vector<NodeId> SpanningTree::members() const {
    std::vector<NodeId> out;
    if (rootId != kNoNode) out.push_back(rootId);
    for (const auto& [child, parent] : parentOf) out.push_back(child);
    return out;
}

std::vector<NodeId> SpanningTree::childrenOf(NodeId id) const {
    std::vector<NodeId> out;
    for (const auto& [child, parent] : parentOf) {
        if (parent == id) out.push_back(child);
    }
    return out;
}

int SpanningTree::depthOf(NodeId id) const {
    int depth = 0;
    while (id != rootId) {
        auto it = parentOf.find(id);
        if (it == parentOf.end()) return -1;
        id = it->second;
        ++depth;
    }
    return depth;
}

double edgeWeight(const Vec2& a, const Vec2& b) { return (a - b).squaredNorm(); }

SpanningTree buildMST(std::span<const MemberState> members, NodeId headId, const RadioConfig& radio) {
    const auto n = static_cast<Eigen::Index>(members.size());
    auto rootIt = std::find_if(members.begin(), members.end(), [&](const MemberState& m) { return m.id == headId; });
    if (rootIt == members.end()) throw std::invalid_argument("buildMST: head is not a cluster member");
    const Eigen::Index root = rootIt - members.begin();

    constexpr double kInf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(n, n, kInf);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (inRange(members[i].position, members[j].position, radio)) {
                w(i, j) = w(j, i) = edgeWeight(members[i].position, members[j].position);
            }
        }
    }

    // Candidate cut edge per outside vertex, compared as (weight, lo id, hi id).
    struct Candidate {
        double weight = kInf;
        NodeId lo = std::numeric_limits<NodeId>::max();
        NodeId hi = std::numeric_limits<NodeId>::max();
        Eigen::Index parent = -1;
        bool operator<(const Candidate& o) const {
            if (weight != o.weight) return weight < o.weight;
            if (lo != o.lo) return lo < o.lo;
            return hi < o.hi;
        }
    };
    std::vector<Candidate> best(static_cast<std::size_t>(n));
    std::vector<bool> inTree(static_cast<std::size_t>(n), false);

    auto relax = [&](Eigen::Index u) {
        for (Eigen::Index v = 0; v < n; ++v) {
            if (inTree[v] || w(u, v) == kInf) continue;
            const NodeId a = members[u].id, b = members[v].id;
            Candidate c{w(u, v), std::min(a, b), std::max(a, b), u};
            if (c < best[v]) best[v] = c;
        }
    };

    SpanningTree tree;
    tree.rootId = headId;
    inTree[root] = true;
    relax(root);
    for (Eigen::Index step = 1; step < n; ++step) {
        Eigen::Index next = -1;
        for (Eigen::Index v = 0; v < n; ++v) {
            if (inTree[v] || best[v].parent < 0) continue;
            if (next < 0 || best[v] < best[next]) next = v;
        }
        if (next < 0) break;
        inTree[next] = true;
        tree.parentOf[members[next].id] = members[best[next].parent].id;
        relax(next);
    }
    for (Eigen::Index v = 0; v < n; ++v) {
        if (!inTree[v]) tree.excluded.push_back(members[v].id);
    }
    std::sort(tree.excluded.begin(), tree.excluded.end());
    return tree;
}

SpanningTree buildMST(const Cluster& cluster, std::span<const VehicleNode> vehicles,
                      const RoadGeometry& road, const RadioConfig& radio) {
    std::vector<MemberState> members;
    for (const auto& v : vehicles) {
        if (cluster.contains(v.id)) members.push_back(memberState(v, road));
    }
    return buildMST(members, cluster.headId, radio);
}

SpanningTree buildStar(std::span<const NodeId> memberIds, NodeId headId) {
    SpanningTree tree;
    tree.rootId = headId;
    for (NodeId id : memberIds) {
        if (id != headId) tree.parentOf[id] = headId;
    }
    return tree;
}

double treeWeight(const SpanningTree& tree, std::span<const MemberState> members) {
    auto pos = [&](NodeId id) -> const Vec2& {
        auto it = std::find_if(members.begin(), members.end(), [&](const MemberState& m) { return m.id == id; });
        if (it == members.end()) throw std::invalid_argument("treeWeight: unknown node");
        return it->position;
    };
    double total = 0.0;
    for (const auto& [child, parent] : tree.parentOf) total += edgeWeight(pos(child), pos(parent));
    return total;
}

bool shouldDrop(const Message& treeData, int segmentId, int direction, double now, const CycleTimers& timers) {
    const auto* p = std::get_if<TreeDataPayload>(&treeData.payload);
    if (!p) return true;
    return (now - treeData.sentAt > timers.validityWindow) || p->record.segmentId != segmentId ||
           p->record.direction != direction;
}

void fuseInto(AggregateRecord& into, const AggregateRecord& child) {
    into.nodeCount += child.nodeCount;
    into.sumSpeed += child.sumSpeed;
    into.minSpeed = std::min(into.minSpeed, child.minSpeed);
    into.maxSpeed = std::max(into.maxSpeed, child.maxSpeed);
}

AggregateRecord fuse(const Reading& own, std::span<const AggregateRecord> children) {
    AggregateRecord r;
    r.segmentId = own.tag.group;
    r.direction = own.tag.direction;
    r.nodeCount = 1;
    r.sumSpeed = own.speed;
    r.minSpeed = own.speed;
    r.maxSpeed = own.speed;
    r.generatedAt = own.sampledAt;
    for (const auto& c : children) fuseInto(r, c);
    return r;
}

std::map<NodeId, double> planTransmitTimes(const SpanningTree& tree, const SlotSchedule& slots,
                                           double gatStart, double hopDelay) {
    std::map<NodeId, std::vector<NodeId>> children;
    for (const auto& [child, parent] : tree.parentOf) children[parent].push_back(child);

    std::map<NodeId, double> at;
    std::function<double(NodeId)> visit = [&](NodeId u) -> double {
        auto kids = children.find(u);
        double t;
        if (kids == children.end()) {
            t = gatStart + slots.slotOf(u).value_or(0) * slots.slotDuration;
        } else {
            t = -std::numeric_limits<double>::infinity();
            for (NodeId c : kids->second) t = std::max(t, visit(c) + hopDelay);
        }
        if (u != tree.rootId) at[u] = t;
        return t;
    };
    if (tree.rootId != kNoNode) visit(tree.rootId);
    return at;
}

void TreeGatherer::armMember(NodeId node, int cycleId, const Reading& own, const GatherRole& role) {
    auto& st = nodes_[node];
    st = NodeState{};
    st.cycleId = cycleId;
    st.parent = role.parent;
    st.pending.insert(role.children.begin(), role.children.end());
    st.own = own;

    const double now = engine_.now();
    if (st.pending.empty()) {
        engine_.schedule(std::max(now, role.slotStart), EventKind::Transmit, [this, node, cycleId] {
            auto& s = nodes_[node];
            if (s.cycleId == cycleId && !s.done) transmit(node);
        });
    } else {
        // Fallback for children whose frames never arrive.
        engine_.schedule(std::max(now, role.forwardBy + kForwardGuard), EventKind::Transmit, [this, node, cycleId] {
            auto& s = nodes_[node];
            if (s.cycleId == cycleId && !s.done) transmit(node);
        });
    }
}

void TreeGatherer::armHead(NodeId head, int cycleId, const Reading& own, std::vector<NodeId> children,
                           double deadline, FoldCallback onFold) {
    auto& st = nodes_[head];
    st = NodeState{};
    st.cycleId = cycleId;
    st.isHead = true;
    st.pending.insert(children.begin(), children.end());
    st.own = own;
    st.onFold = std::move(onFold);
    stats(cycleId, own.tag);
    engine_.schedule(std::max(engine_.now(), deadline), EventKind::Phase, [this, head, cycleId] {
        auto& s = nodes_[head];
        if (s.cycleId == cycleId && !s.done) fold(head);
    });
}

void TreeGatherer::transmit(NodeId node) {
    auto& st = nodes_[node];
    st.done = true;
    TreeDataPayload p;
    p.record = fuse(st.own, st.childRecords);
    p.record.cycleId = st.cycleId;
    p.record.generatedAt = engine_.now();
    p.readings.reserve(st.readings.size() + 1);
    p.readings.push_back(st.own);
    p.readings.insert(p.readings.end(), st.readings.begin(), st.readings.end());

    auto& s = stats(st.cycleId, st.own.tag);
    ++s.treeDataSent;
    const int count = p.record.nodeCount;
    auto sent = medium_.unicast(makeMessage(MessageKind::TreeData, node, st.parent, st.cycleId, std::move(p)));
    if (!sent) s.lostReadings += count;
}

void TreeGatherer::onTreeData(NodeId receiver, const Message& msg) {
    const auto& p = std::get<TreeDataPayload>(msg.payload);
    auto& s = stats(msg.cycleId, p.record.tag());
    const int count = p.record.nodeCount;
    auto it = nodes_.find(receiver);
    if (it == nodes_.end() || it->second.cycleId != msg.cycleId) {
        // Receiver holds no role this cycle.
        s.lostReadings += count;
        return;
    }
    auto& st = it->second;
    if (st.done) {
        s.lateReadings += count;
        engine_.metrics().lateReadings += static_cast<std::uint64_t>(count);
        return;
    }
    st.pending.erase(msg.src);
    const double now = engine_.now();
    if (shouldDrop(msg, st.own.tag.group, st.own.tag.direction, now, timers_)) {
        s.filteredReadings += count;
        engine_.metrics().droppedReadings += static_cast<std::uint64_t>(count);
    } else {
        ++s.treeDataAccepted;
        s.acceptedDeliveryTimes.push_back(now);
        st.childRecords.push_back(p.record);
        st.readings.insert(st.readings.end(), p.readings.begin(), p.readings.end());
    }
    if (!st.isHead && st.pending.empty()) transmit(receiver);
}

void TreeGatherer::fold(NodeId head) {
    auto& st = nodes_[head];
    st.done = true;
    AggregateRecord record = fuse(st.own, st.childRecords);
    record.cycleId = st.cycleId;
    record.generatedAt = engine_.now();
    std::vector<Reading> readings;
    readings.reserve(st.readings.size() + 1);
    readings.push_back(st.own);
    readings.insert(readings.end(), st.readings.begin(), st.readings.end());
    if (!st.onFold) return;
    engine_.schedule(engine_.now() + timers_.aggDuration, EventKind::Phase,
                     [cb = st.onFold, head, record, readings = std::move(readings)] { cb(head, record, readings); });
}

GatherResult runGatherCycle(const Cluster& cluster, const SpanningTree& tree,
                            std::vector<VehicleNode> vehicles, const RoadGeometry& road,
                            const RadioConfig& radio, const CycleTimers& timers, double now,
                            int cycleId) {
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        if (vehicles[i].id != static_cast<NodeId>(i)) throw std::invalid_argument("runGatherCycle: vehicle ids must equal their index");
    }
    Engine engine(std::numeric_limits<double>::infinity(), now);

    RadioMedium medium(engine, radio, road, vehicles);
    TreeGatherer gatherer(engine, medium, timers);
    medium.setV2VReceiver([&](NodeId r, const Message& m) {
        if (m.kind == MessageKind::TreeData) gatherer.onTreeData(r, m);
    });

    const auto slots = assignSlots(tree.members(), tree.rootId, timers.gatDuration);
    const auto plan = planTransmitTimes(tree, slots, now, radio.packetProcessingDelay);
    auto readingOf = [&](NodeId id) { return Reading{id, vehicles.at(id).speed, cluster.tag, now}; };

    GatherResult result;
    result.record = AggregateRecord{};
    for (const auto& [child, parent] : tree.parentOf) {
        GatherRole role;
        role.parent = parent;
        role.children = tree.childrenOf(child);
        role.slot = slots.slotOf(child).value_or(0);
        role.slotStart = now + role.slot * slots.slotDuration;
        role.forwardBy = plan.at(child);
        gatherer.armMember(child, cycleId, readingOf(child), role);
    }
    gatherer.armHead(tree.rootId, cycleId, readingOf(tree.rootId), tree.childrenOf(tree.rootId),
                     now + timers.gatDuration,
                     [&](NodeId, const AggregateRecord& rec, const std::vector<Reading>& rd) {
                         result.record = rec;
                         result.readings = rd;
                     });
    engine.run(now + timers.gatDuration + timers.aggDuration);
    result.stats = gatherer.stats(cycleId, cluster.tag);
    return result;
}

void BaseStation::onMessage(const Message& msg, double now) {
    if (const auto* agg = std::get_if<V2IAggregatePayload>(&msg.payload)) {
        auto key = std::pair{agg->record.cycleId, agg->record.tag()};
        auto [it, fresh] = store_.try_emplace(key, Entry{agg->record, agg->readings, now});
        if (!fresh) {
            fuseInto(it->second.record, agg->record);
            it->second.readings.insert(it->second.readings.end(), agg->readings.begin(), agg->readings.end());
        }
    } else if (const auto* rep = std::get_if<NodeReportPayload>(&msg.payload)) {
        auto key = std::pair{msg.cycleId, rep->reading.tag};
        auto it = store_.find(key);
        if (it == store_.end()) {
            AggregateRecord r = fuse(rep->reading, {});
            r.cycleId = msg.cycleId;
            store_.emplace(key, Entry{r, {rep->reading}, now});
        } else {
            fuseInto(it->second.record, fuse(rep->reading, {}));
            it->second.readings.push_back(rep->reading);
            it->second.receivedAt = now;
        }
    }
}

std::vector<AggregateRecord> BaseStation::cycleRecords(int cycleId) const {
    std::vector<AggregateRecord> out;
    for (auto it = store_.lower_bound({cycleId, ClusterTag{std::numeric_limits<int>::min(), std::numeric_limits<int>::min()}});
         it != store_.end() && it->first.first == cycleId; ++it) {
        out.push_back(it->second.record);
    }
    return out;
}

Delivery disseminate(RadioMedium& medium, NodeId head, const AggregateRecord& record,
                     std::vector<Reading> readings) {
    return medium.sendToBaseStation(makeMessage(MessageKind::V2IAggregate, head, kBaseStation, record.cycleId,
                                                V2IAggregatePayload{record, std::move(readings)}));
}

RoadSummary providerAggregate(std::span<const AggregateRecord> records) {
    std::map<ClusterTag, std::pair<int, double>> byTag;
    int total = 0;
    double sum = 0.0;
    for (const auto& r : records) {
        auto& [count, s] = byTag[r.tag()];
        count += r.nodeCount;
        s += r.sumSpeed;
        total += r.nodeCount;
        sum += r.sumSpeed;
    }
    RoadSummary out;
    for (const auto& [tag, cs] : byTag) {
        out.segments.push_back({tag, cs.first, cs.first > 0 ? cs.second / cs.first : std::numeric_limits<double>::quiet_NaN()});
    }
    out.vehicleCount = total;
    out.meanSpeed = total > 0 ? sum / total : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace tcdgp
