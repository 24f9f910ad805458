#include "tcdgp/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace tcdgp {

TcdgpProtocol::TcdgpProtocol(Engine& engine, RadioMedium& medium, std::vector<VehicleNode>& vehicles,
                             const SimConfig& cfg, TreeShape shape)
    : engine_(engine),
      medium_(medium),
      vehicles_(vehicles),
      cfg_(cfg),
      shape_(shape),
      gatherer_(engine, medium, cfg.timers),
      proto_(vehicles.size()) {}

TagAssignment assignClusters(std::span<const VehicleNode> vehicles, const SimConfig& cfg) {
    const auto& road = cfg.geometry;
    TagAssignment out;
    auto& tags = out.tags;
    tags.resize(vehicles.size());
    if (cfg.clusterMode == ClusterMode::Segment) {
        for (const auto& v : vehicles) tags.at(v.id) = segmentTag(v, road);
        return out;
    }
    // Base-station split, run separately per travel direction.
    for (int dir : {+1, -1}) {
        std::vector<MemberState> group;
        for (const auto& v : vehicles) {
            if (v.direction == dir) group.push_back(memberState(v, road));
        }
        if (group.empty()) continue;
        const auto target = std::min<std::size_t>(static_cast<std::size_t>(road.segmentCount), group.size());
        for (const auto& c : splitNetwork(std::span<const MemberState>(group), target)) {
            for (NodeId id : c.memberIds) tags.at(id) = {c.clusterId, dir};
            out.designated.push_back(c.headId);
        }
    }
    std::sort(out.designated.begin(), out.designated.end());
    return out;
}

std::vector<ClusterTag> assignTags(std::span<const VehicleNode> vehicles, const SimConfig& cfg) {
    return assignClusters(vehicles, cfg).tags;
}

std::vector<std::pair<int, double>> cycleStarts(const SimConfig& cfg) {
    const auto cycles = static_cast<int>(std::floor(cfg.duration / cfg.timers.fullDuration + 1e-9));
    std::vector<std::pair<int, double>> out;
    for (int c = 0; c < cycles; ++c) out.emplace_back(c, c * cfg.timers.fullDuration);
    return out;
}

void TcdgpProtocol::scheduleCycles() {
    for (const auto& [c, t0] : cycleStarts(cfg_)) {
        engine_.schedule(t0, EventKind::CycleStart, [this, c = c] { startCycle(c); });
    }
}

void TcdgpProtocol::startCycle(int cycle) {
    cycle_ = cycle;
    cycleStart_ = engine_.now();
    const auto assignment = assignClusters(vehicles_, cfg_);
    const bool split = cfg_.clusterMode == ClusterMode::Split;
    for (auto& v : vehicles_) {
        auto& p = proto_[v.id];
        p.tag = assignment.tags[v.id];
        p.table.evictOlderThan(cycleStart_, cfg_.timers.fullDuration);
        // Split groups are re-formed every cycle, so a group id carries no history.
        p.incumbent = !split && p.headedLastCycle && p.headedTag == p.tag;
        p.designated = std::binary_search(assignment.designated.begin(), assignment.designated.end(), v.id);
        p.isHead = false;
        p.heard.clear();
        p.joiners.clear();
        v.state = p.incumbent ? NodeState::ClusterHead : NodeState::Sensing;
        v.currentReading = v.speed;
        p.reading = Reading{v.id, v.speed, p.tag, cycleStart_};

        auto& g = frozen_[{cycle, p.tag}];
        ++g.count;
        g.sumSpeed += v.speed;
        g.members.push_back(v.id);
    }
    engine_.schedule(cycleStart_ + cfg_.radio.initialSetupDelay, EventKind::Phase, [this] { helloRound(); });
}

void TcdgpProtocol::helloRound() {
    const auto& road = cfg_.geometry;
    for (const auto& v : vehicles_) {
        auto& p = proto_[v.id];
        HelloPayload h;
        h.position = v.position(road);
        h.residualEnergy = v.residualEnergy;
        h.distanceToBS = (h.position - road.baseStation).norm();
        h.state = v.state;
        h.tag = p.tag;
        h.incumbentHead = p.incumbent;
        p.helloPosition = h.position;
        medium_.broadcast(makeMessage(MessageKind::Hello, v.id, kBroadcast, cycle_, h));
    }
    engine_.schedule(engine_.now() + cfg_.radio.helloProcessingDelay, EventKind::Phase, [this] { election(); });
}

std::vector<MemberState> TcdgpProtocol::viewOf(NodeId id) const {
    const auto& p = proto_[id];
    std::vector<MemberState> view{{id, p.helloPosition, vehicles_[id].residualEnergy}};
    for (const auto* row : p.table.withTag(p.tag)) {
        if (row->heardAt >= cycleStart_) view.push_back({row->neighborId, row->position, row->residualEnergy});
    }
    return view;
}

void TcdgpProtocol::becomeHead(NodeId id, bool announce) {
    auto& p = proto_[id];
    p.isHead = true;
    vehicles_[id].state = NodeState::ClusterHead;
    auto& t = traces_[{cycle_, p.tag}];
    t.cycle = cycle_;
    t.tag = p.tag;
    t.head = id;
    if (announce) {
        medium_.broadcast(makeMessage(MessageKind::CHNotify, id, kBroadcast, cycle_, CHNotifyPayload{p.tag, true}));
    }
}

void TcdgpProtocol::election() {
    const auto& road = cfg_.geometry;
    for (const auto& v : vehicles_) {
        auto& p = proto_[v.id];
        const auto view = viewOf(v.id);
        if (p.incumbent) {
            std::vector<WeightedMember> weighted;
            double own = 0.0;
            for (const auto& m : view) {
                const double w = computeWeight(m, view, road, cfg_.weights);
                if (m.id == v.id) {
                    own = w;
                } else {
                    weighted.push_back({m.id, w});
                    if (auto* row = p.table.mutableFind(m.id)) row->weight = w;
                }
            }
            const auto decision = rotateCH(v.id, own, weighted);
            if (!decision.handedOver) {
                becomeHead(v.id, true);
            } else {
                vehicles_[v.id].state = NodeState::Sensing;
                traces_[{cycle_, p.tag}].handedOver = true;
                medium_.unicast(makeMessage(MessageKind::CHNotify, v.id, decision.head, cycle_,
                                            CHNotifyPayload{p.tag, false}));
            }
            continue;
        }
        if (cfg_.clusterMode == ClusterMode::Split) {
            if (p.designated) becomeHead(v.id, true);
            continue;
        }
        const bool deferToIncumbent = std::any_of(view.begin() + 1, view.end(), [&](const MemberState& m) {
            const auto* row = p.table.find(m.id);
            return row && row->incumbentHead;
        });
        if (!deferToIncumbent && selectInitialCH(view) == v.id) becomeHead(v.id, true);
    }
    engine_.schedule(engine_.now() + cfg_.radio.packetProcessingDelay, EventKind::Phase, [this] {
        // Hand-over successors announce during this step; joins wait one more hop.
        engine_.schedule(engine_.now() + cfg_.radio.packetProcessingDelay, EventKind::Phase, [this] { joinRound(); });
    });
}

void TcdgpProtocol::joinRound() {
    for (const auto& v : vehicles_) {
        auto& p = proto_[v.id];
        if (p.isHead) continue;
        const auto choice = joinCluster(p.heard);
        if (!choice) {
            ++engine_.metrics().unclusteredNodeCycles;
            ++protocolDrops_[{cycle_, p.tag}];
            continue;
        }
        if (!medium_.unicast(makeMessage(MessageKind::Join, v.id, *choice, cycle_, JoinPayload{p.tag}))) {
            ++protocolDrops_[{cycle_, p.tag}];
        }
    }
    engine_.schedule(engine_.now() + cfg_.radio.packetProcessingDelay, EventKind::Phase, [this] { slotRound(); });
}

void TcdgpProtocol::slotRound() {
    const double gatStart = cfg_.timers.gatStart(cycleStart_);
    for (const auto& v : vehicles_) {
        auto& p = proto_[v.id];
        if (!p.isHead) continue;
        auto& trace = traces_[{cycle_, p.tag}];

        std::vector<MemberState> members{{v.id, p.helloPosition, v.residualEnergy}};
        std::vector<NodeId> memberIds{v.id};
        auto joiners = p.joiners;
        std::sort(joiners.begin(), joiners.end());
        joiners.erase(std::unique(joiners.begin(), joiners.end()), joiners.end());
        trace.joined = static_cast<int>(joiners.size());
        for (NodeId j : joiners) {
            const auto* row = p.table.find(j);
            if (!row || row->heardAt < cycleStart_) {
                ++engine_.metrics().unreachableMembers;
                ++protocolDrops_[{cycle_, p.tag}];
                continue;
            }
            members.push_back({j, row->position, row->residualEnergy});
            memberIds.push_back(j);
        }

        SpanningTree tree = shape_ == TreeShape::MinimumSpanning ? buildMST(members, v.id, cfg_.radio)
                                                                 : buildStar(memberIds, v.id);
        engine_.metrics().unreachableMembers += tree.excluded.size();
        protocolDrops_[{cycle_, p.tag}] += static_cast<int>(tree.excluded.size());

        const auto slots = assignSlots(tree.members(), v.id, cfg_.timers.gatDuration);
        const auto plan = planTransmitTimes(tree, slots, gatStart, cfg_.radio.packetProcessingDelay);

        trace.treeSize = 1;
        trace.frozenMembers = {v.id};
        for (const auto& [child, parent] : tree.parentOf) {
            SlotAssignPayload sa;
            sa.slot = slots.slotOf(child).value_or(0);
            sa.slotStart = gatStart + sa.slot * slots.slotDuration;
            sa.slotDuration = slots.slotDuration;
            sa.parent = parent;
            sa.children = tree.childrenOf(child);
            sa.forwardBy = plan.at(child);
            if (medium_.unicast(makeMessage(MessageKind::SlotAssign, v.id, child, cycle_, std::move(sa)))) {
                ++trace.treeSize;
                trace.frozenMembers.push_back(child);
            } else {
                ++protocolDrops_[{cycle_, p.tag}];
            }
        }
        std::sort(trace.frozenMembers.begin() + 1, trace.frozenMembers.end());

        gatherer_.armHead(v.id, cycle_, p.reading, tree.childrenOf(v.id), cfg_.timers.foldDeadline(cycleStart_),
                          [this](NodeId head, const AggregateRecord& rec, const std::vector<Reading>& readings) {
                              disseminate(medium_, head, rec, readings);
                              if (sink_) sink_(head, rec, readings);
                          });
        p.headedLastCycle = true;
        p.headedTag = p.tag;
    }
    for (const auto& v : vehicles_) {
        auto& p = proto_[v.id];
        if (!p.isHead) p.headedLastCycle = false;
    }
}

void TcdgpProtocol::onV2V(NodeId receiver, const Message& msg) {
    auto& p = proto_[receiver];
    const auto& road = cfg_.geometry;
    switch (msg.kind) {
        case MessageKind::Hello:
            updateNeighborTable(p.table, vehicles_[receiver].position(road), msg, engine_.now());
            break;
        case MessageKind::CHNotify: {
            if (msg.cycleId != cycle_) break;
            const auto& n = std::get<CHNotifyPayload>(msg.payload);
            if (!n.announce) {
                becomeHead(receiver, true);
                break;
            }
            if (p.isHead || n.tag != p.tag) break;
            const Vec2 from = vehicles_[msg.src].position(road);
            const Vec2 to = vehicles_[receiver].position(road);
            if (inRange(from, to, cfg_.radio)) p.heard.push_back({msg.src, receivedPower(from, to, cfg_.radio)});
            break;
        }
        case MessageKind::Join: {
            const auto& j = std::get<JoinPayload>(msg.payload);
            if (msg.cycleId == cycle_ && p.isHead && j.tag == p.tag) p.joiners.push_back(msg.src);
            break;
        }
        case MessageKind::SlotAssign: {
            if (msg.cycleId != cycle_) break;
            const auto& sa = std::get<SlotAssignPayload>(msg.payload);
            GatherRole role{sa.parent, sa.children, sa.slot, sa.slotStart, sa.forwardBy};
            gatherer_.armMember(receiver, cycle_, p.reading, role);
            break;
        }
        case MessageKind::TreeData:
            gatherer_.onTreeData(receiver, msg);
            break;
        default:
            break;
    }
}

const std::vector<ClusterCycleTrace>& TcdgpProtocol::traces() const {
    traceList_.clear();
    for (const auto& [key, t] : traces_) {
        auto copy = t;
        auto it = gatherer_.allStats().find(key);
        copy.treeDataSent = it == gatherer_.allStats().end() ? 0 : it->second.treeDataSent;
        traceList_.push_back(std::move(copy));
    }
    return traceList_;
}

int TcdgpProtocol::dropsFor(int cycle, const ClusterTag& tag) const {
    int drops = 0;
    if (auto it = protocolDrops_.find({cycle, tag}); it != protocolDrops_.end()) drops += it->second;
    if (auto it = gatherer_.allStats().find({cycle, tag}); it != gatherer_.allStats().end()) drops += it->second.drops();
    return drops;
}

}  // namespace tcdgp
