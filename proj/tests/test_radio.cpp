#include "doctest.h"

#include <cmath>
#include <vector>

#include "tcdgp/radio.hpp"

using namespace tcdgp;

namespace {

VehicleNode at(NodeId id, double x, int lane = 0) {
    VehicleNode v;
    v.id = id;
    v.x = x;
    v.lane = lane;
    v.direction = laneDirection(lane);
    return v;
}

}  // namespace

TEST_CASE("range is a closed disk") {
    RadioConfig cfg;
    const Vec2 o(0, 0);
    CHECK(inRange(o, o, cfg));
    CHECK(inRange(o, Vec2(266, 0), cfg));
    CHECK(inRange(o, Vec2(std::nextafter(266.0, 0.0), 0), cfg));
    CHECK_FALSE(inRange(o, Vec2(std::nextafter(266.0, 1e9), 0), cfg));
    CHECK_FALSE(inRange(o, Vec2(300, 0), cfg));
    CHECK(inRange(Vec2(0, 0), Vec2(0, 266), cfg));
}

TEST_CASE("received power ordering and clamp") {
    RadioConfig cfg;
    const Vec2 o(0, 0);
    CHECK(receivedPower(o, Vec2(1, 0), cfg) == 1.0);
    CHECK(receivedPower(o, o, cfg) == 1.0);
    CHECK(receivedPower(o, Vec2(0.5, 0), cfg) == 1.0);
    CHECK(receivedPower(o, Vec2(10, 0), cfg) > receivedPower(o, Vec2(100, 0), cfg));
    CHECK(receivedPower(o, Vec2(10, 0), cfg) == doctest::Approx(0.01));
    CHECK_THROWS_AS(receivedPower(o, Vec2(300, 0), cfg), std::invalid_argument);
}

TEST_CASE("isolated broadcast counts once and reaches nobody") {
    Engine engine;
    RoadGeometry road;
    std::vector<VehicleNode> vs{at(0, 0.0), at(1, 1000.0)};
    RadioMedium medium(engine, {}, road, vs);
    int received = 0;
    medium.setV2VReceiver([&](NodeId, const Message&) { ++received; });
    const auto d = medium.broadcast(makeMessage(MessageKind::CHNotify, 0, kBroadcast, 0, CHNotifyPayload{}));
    engine.run(10.0);
    CHECK(d.empty());
    CHECK(received == 0);
    CHECK(engine.metrics().v2vMessageCount == 1);
    CHECK(engine.metrics().perKindCounts.at("CHNotify") == 1);
}

TEST_CASE("broadcast reaches every in-range node after PK_PT") {
    Engine engine;
    RoadGeometry road;
    std::vector<VehicleNode> vs{at(0, 500.0), at(1, 520.0), at(2, 600.0, 1), at(3, 766.0), at(4, 767.0)};
    RadioMedium medium(engine, {}, road, vs);
    std::vector<std::pair<NodeId, double>> got;
    medium.setV2VReceiver([&](NodeId r, const Message&) { got.emplace_back(r, engine.now()); });
    engine.schedule(2.0, EventKind::Generic, [&] {
        medium.broadcast(makeMessage(MessageKind::CHNotify, 0, kBroadcast, 0, CHNotifyPayload{}));
    });
    engine.run(10.0);
    // (766, lane0) is exactly 266 m away; (600, lane1) is within range diagonally.
    REQUIRE(got.size() == 3);
    CHECK(got[0].first == 1);
    CHECK(got[1].first == 2);
    CHECK(got[2].first == 3);
    for (const auto& [r, t] : got) CHECK(t == doctest::Approx(2.2));
}

TEST_CASE("hello frames use the hello processing delay") {
    Engine engine;
    RoadGeometry road;
    std::vector<VehicleNode> vs{at(0, 0.0), at(1, 10.0)};
    RadioMedium medium(engine, {}, road, vs);
    double when = -1.0;
    medium.setV2VReceiver([&](NodeId, const Message&) { when = engine.now(); });
    medium.broadcast(makeMessage(MessageKind::Hello, 0, kBroadcast, 0, HelloPayload{}));
    engine.run(10.0);
    CHECK(when == doctest::Approx(0.1));
}

TEST_CASE("unicast out of range is lost and counted") {
    Engine engine;
    RoadGeometry road;
    std::vector<VehicleNode> vs{at(0, 0.0), at(1, 10.0), at(2, 900.0)};
    RadioMedium medium(engine, {}, road, vs);
    int received = 0;
    medium.setV2VReceiver([&](NodeId, const Message&) { ++received; });
    CHECK(medium.unicast(makeMessage(MessageKind::Join, 0, 1, 0, JoinPayload{})).has_value());
    CHECK_FALSE(medium.unicast(makeMessage(MessageKind::Join, 0, 2, 0, JoinPayload{})).has_value());
    engine.run(10.0);
    CHECK(received == 1);
    CHECK(engine.metrics().v2vMessageCount == 2);
    CHECK(engine.metrics().lostMessages == 1);
}

TEST_CASE("V2I sends reach the base station from anywhere and add up") {
    Engine engine;
    RoadGeometry road;
    std::vector<VehicleNode> vs;
    for (int i = 0; i < 100; ++i) vs.push_back(at(i, i * 18.0));
    RadioMedium medium(engine, {}, road, vs);
    int received = 0;
    medium.setBaseStationReceiver([&](const Message&) { ++received; });
    for (int i = 0; i < 100; ++i) {
        medium.sendToBaseStation(makeMessage(MessageKind::NodeReport, i, kBaseStation, 0, NodeReportPayload{}));
    }
    engine.run(10.0);
    CHECK(received == 100);
    CHECK(engine.metrics().v2iMessageCount == 100);
    CHECK(engine.metrics().v2vMessageCount == 0);
}

TEST_CASE("far-end head still reaches the base station") {
    Engine engine;
    RoadGeometry road;
    std::vector<VehicleNode> vs{at(0, 1799.9)};
    RadioMedium medium(engine, {}, road, vs);
    int received = 0;
    medium.setBaseStationReceiver([&](const Message&) { ++received; });
    engine.schedule(5.0, EventKind::Generic, [&] {
        medium.sendToBaseStation(makeMessage(MessageKind::V2IAggregate, 0, kBaseStation, 0, V2IAggregatePayload{}));
    });
    engine.run(10.0);
    CHECK(received == 1);
    CHECK(engine.metrics().v2iMessageCount == 1);
}

TEST_CASE("media are enforced per kind") {
    Engine engine;
    RoadGeometry road;
    std::vector<VehicleNode> vs{at(0, 0.0), at(1, 10.0)};
    RadioMedium medium(engine, {}, road, vs);
    CHECK_THROWS_AS(medium.broadcast(makeMessage(MessageKind::V2IAggregate, 0, kBroadcast, 0, {})), std::invalid_argument);
    CHECK_THROWS_AS(medium.sendToBaseStation(makeMessage(MessageKind::Hello, 0, kBaseStation, 0, {})), std::invalid_argument);
}

TEST_CASE("transmissions drain energy when configured") {
    Engine engine;
    RoadGeometry road;
    RadioConfig cfg;
    cfg.energyPerTransmission = 0.25;
    std::vector<VehicleNode> vs{at(0, 0.0), at(1, 10.0)};
    RadioMedium medium(engine, cfg, road, vs);
    for (int i = 0; i < 5; ++i) medium.broadcast(makeMessage(MessageKind::Hello, 0, kBroadcast, 0, HelloPayload{}));
    CHECK(vs[0].residualEnergy == 0.0);
    CHECK(vs[1].residualEnergy == 1.0);
}
