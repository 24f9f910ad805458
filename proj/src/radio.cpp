#include "tcdgp/radio.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace tcdgp {

std::string_view toString(MessageKind kind) {
    switch (kind) {
        case MessageKind::Hello: return "Hello";
        case MessageKind::CHNotify: return "CHNotify";
        case MessageKind::Join: return "Join";
        case MessageKind::SlotAssign: return "SlotAssign";
        case MessageKind::TreeData: return "TreeData";
        case MessageKind::V2IAggregate: return "V2IAggregate";
        case MessageKind::NodeReport: return "NodeReport";
    }
    return "Unknown";
}

Message makeMessage(MessageKind kind, NodeId src, NodeId dst, int cycleId, Payload payload) {
    Message m;
    m.kind = kind;
    m.src = src;
    m.dst = dst;
    m.medium = mediumFor(kind);
    m.cycleId = cycleId;
    m.payload = std::move(payload);
    return m;
}

void RadioConfig::validate() const {
    if (!(transmissionRange > 0)) throw std::invalid_argument("radio.transmission_range: must be positive");
    if (helloProcessingDelay < 0) throw std::invalid_argument("radio.hl_pt: must be >= 0");
    if (packetProcessingDelay < 0) throw std::invalid_argument("radio.pk_pt: must be >= 0");
    if (initialSetupDelay < 0) throw std::invalid_argument("radio.is_pt: must be >= 0");
    if (!(capacityBps > 0)) throw std::invalid_argument("radio.capacity_bps: must be positive");
    if (energyPerTransmission < 0 || energyPerTransmission > 1) {
        throw std::invalid_argument("radio.energy_per_tx: must be in [0, 1]");
    }
}

bool inRange(const Vec2& a, const Vec2& b, const RadioConfig& cfg) {
    return (a - b).norm() <= cfg.transmissionRange;
}

double receivedPower(const Vec2& src, const Vec2& dst, const RadioConfig& cfg) {
    if (!inRange(src, dst, cfg)) throw std::invalid_argument("receivedPower: nodes are out of range");
    return 1.0 / std::max((src - dst).squaredNorm(), 1.0);
}

void RadioMedium::account(const Message& msg) {
    auto& m = engine_.metrics();
    if (msg.medium == Medium::V2I) {
        ++m.v2iMessageCount;
    } else {
        ++m.v2vMessageCount;
        if (msg.src >= 0 && cfg_.energyPerTransmission > 0) {
            auto& e = vehicles_.at(msg.src).residualEnergy;
            e = std::max(0.0, e - cfg_.energyPerTransmission);
        }
    }
    ++m.perKindCounts[std::string(toString(msg.kind))];
}

std::vector<Delivery> RadioMedium::broadcast(Message msg) {
    if (msg.medium != Medium::V2V) throw std::invalid_argument("broadcast: V2I message on the V2V medium");
    msg.sentAt = engine_.now();
    msg.dst = kBroadcast;
    account(msg);

    const Vec2 from = vehicles_.at(msg.src).position(road_);
    const double at = msg.sentAt + cfg_.deliveryDelay(msg.kind);
    std::vector<Delivery> out;
    out.reserve(64);
    for (const auto& v : vehicles_) {
        if (v.id == msg.src || std::abs(v.x - from.x()) > cfg_.transmissionRange) continue;
        if (inRange(from, v.position(road_), cfg_)) out.push_back({v.id, at});
    }
    if (!out.empty()) {
        // One engine event fans the frame out to all receivers in id order.
        auto shared = std::make_shared<const Message>(std::move(msg));
        std::vector<NodeId> receivers;
        receivers.reserve(out.size());
        for (const auto& d : out) receivers.push_back(d.receiver);
        engine_.schedule(at, EventKind::Delivery, [this, shared, receivers = std::move(receivers)] {
            if (!v2vReceiver_) return;
            for (NodeId r : receivers) v2vReceiver_(r, *shared);
        });
    }
    return out;
}

std::optional<Delivery> RadioMedium::unicast(Message msg) {
    if (msg.medium != Medium::V2V) throw std::invalid_argument("unicast: V2I message on the V2V medium");
    msg.sentAt = engine_.now();
    account(msg);
    const auto& src = vehicles_.at(msg.src);
    const auto& dst = vehicles_.at(msg.dst);
    if (!inRange(src.position(road_), dst.position(road_), cfg_)) {
        ++engine_.metrics().lostMessages;
        return std::nullopt;
    }
    const double at = msg.sentAt + cfg_.deliveryDelay(msg.kind);
    const NodeId receiver = msg.dst;
    engine_.schedule(at, EventKind::Delivery, [this, receiver, m = std::move(msg)] {
        if (v2vReceiver_) v2vReceiver_(receiver, m);
    });
    return Delivery{receiver, at};
}

Delivery RadioMedium::sendToBaseStation(Message msg) {
    if (msg.medium != Medium::V2I) throw std::invalid_argument("sendToBaseStation: V2V message on the V2I medium");
    msg.sentAt = engine_.now();
    msg.dst = kBaseStation;
    account(msg);
    const double at = msg.sentAt + cfg_.packetProcessingDelay;
    engine_.schedule(at, EventKind::Delivery, [this, m = std::move(msg)] {
        if (v2iReceiver_) v2iReceiver_(m);
    });
    return Delivery{kBaseStation, at};
}

}  // namespace tcdgp
