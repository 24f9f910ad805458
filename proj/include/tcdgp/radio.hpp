#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tcdgp/engine.hpp"
#include "tcdgp/messages.hpp"
#include "tcdgp/mobility.hpp"

namespace tcdgp {

struct RadioConfig {
    double transmissionRange = 266.0;
    double helloProcessingDelay = 0.1;   // HL_PT
    double packetProcessingDelay = 0.2;  // PK_PT
    double initialSetupDelay = 0.1;      // IS_PT
    double capacityBps = 2e6;            // recorded, never enforced
    // Residual energy drained per V2V transmission; 0 keeps energy at 1.0.
    double energyPerTransmission = 0.0;

    void validate() const;
    double deliveryDelay(MessageKind kind) const {
        return kind == MessageKind::Hello ? helloProcessingDelay : packetProcessingDelay;
    }
};

// Unit-disk connectivity, boundary inclusive.
bool inRange(const Vec2& a, const Vec2& b, const RadioConfig& cfg);

// 1 / max(d^2, 1 m^2). Only meaningful as an ordering. Throws
// std::invalid_argument for out-of-range pairs.
double receivedPower(const Vec2& src, const Vec2& dst, const RadioConfig& cfg);

struct Delivery {
    NodeId receiver = kNoNode;
    double time = 0.0;
};

// Ideal shared medium over a live vehicle table (vehicle id == index).
// Every transmission is counted once, whatever the number of receivers.
class RadioMedium {
public:
    using V2VReceiver = std::function<void(NodeId receiver, const Message&)>;
    using V2IReceiver = std::function<void(const Message&)>;

    RadioMedium(Engine& engine, RadioConfig cfg, const RoadGeometry& road,
                std::vector<VehicleNode>& vehicles)
        : engine_(engine), cfg_(cfg), road_(road), vehicles_(vehicles) {}

    void setV2VReceiver(V2VReceiver r) { v2vReceiver_ = std::move(r); }
    void setBaseStationReceiver(V2IReceiver r) { v2iReceiver_ = std::move(r); }

    // Delivers to every other vehicle in range of the sender at send time.
    // Throws std::invalid_argument if msg is not a V2V kind.
    std::vector<Delivery> broadcast(Message msg);

    // Point-to-point V2V. Returns nullopt (and counts a lost message) when the
    // destination is out of range at send time.
    std::optional<Delivery> unicast(Message msg);

    // The base station covers the whole road, so this always delivers.
    Delivery sendToBaseStation(Message msg);

    const RadioConfig& config() const { return cfg_; }

private:
    void account(const Message& msg);

    Engine& engine_;
    RadioConfig cfg_;
    const RoadGeometry& road_;
    std::vector<VehicleNode>& vehicles_;
    V2VReceiver v2vReceiver_;
    V2IReceiver v2iReceiver_;
};

}  // namespace tcdgp
