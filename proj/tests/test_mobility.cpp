#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tcdgp/mobility.hpp"

using namespace tcdgp;

namespace {

void checkInvariants(const std::vector<VehicleNode>& vs, const RoadGeometry& road, const MobilityParams& p) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const auto& v = vs[i];
        CHECK(v.id == static_cast<NodeId>(i));
        CHECK(v.x >= 0.0);
        CHECK(v.x < road.length);
        CHECK(v.lane >= 0);
        CHECK(v.lane < road.lanes);
        CHECK(v.direction == laneDirection(v.lane));
        CHECK(v.speed >= 0.0);
        CHECK(v.speed <= p.maxSpeed);
        const Vec2 pos = v.position(road);
        CHECK(pos.y() > 0.0);
        CHECK(pos.y() < road.width);
    }
}

}  // namespace

TEST_CASE("initVehicles sizes and invariants") {
    RoadGeometry road;
    MobilityParams p;
    for (std::size_t n : {50u, 1000u}) {
        RandomSource rng(5);
        const auto s = rng.registerStream("mobility");
        const auto vs = initVehicles(road, n, rng, s, p);
        CHECK(vs.size() == n);
        checkInvariants(vs, road, p);
    }
}

TEST_CASE("initVehicles is reproducible") {
    RoadGeometry road;
    RandomSource a(11), b(11);
    const auto sa = a.registerStream("mobility");
    const auto sb = b.registerStream("mobility");
    const auto va = initVehicles(road, 200, a, sa);
    const auto vb = initVehicles(road, 200, b, sb);
    for (std::size_t i = 0; i < va.size(); ++i) {
        CHECK(va[i].x == vb[i].x);
        CHECK(va[i].lane == vb[i].lane);
        CHECK(va[i].speed == vb[i].speed);
    }
}

TEST_CASE("initVehicles rejects zero vehicles") {
    RoadGeometry road;
    RandomSource rng(1);
    const auto s = rng.registerStream("mobility");
    CHECK_THROWS_AS(initVehicles(road, 0, rng, s), std::invalid_argument);
}

TEST_CASE("kinematic step moves by speed * dt") {
    RoadGeometry road;
    RandomSource rng(1);
    const auto s = rng.registerStream("mobility");
    std::vector<VehicleNode> vs(3);
    vs[0] = {0, 100.0, 0, +1, 30.0};
    vs[1] = {1, 100.0, 1, -1, 30.0};
    vs[2] = {2, 100.0, 0, +1, 0.0};
    stepMobility(vs, road, 1.0, rng, s);
    CHECK(vs[0].x == 130.0);
    CHECK(vs[1].x == 70.0);
    CHECK(vs[2].x == 100.0);
}

TEST_CASE("vehicle leaving the far end reappears at the near end") {
    RoadGeometry road;
    RandomSource rng(1);
    const auto s = rng.registerStream("mobility");
    std::vector<VehicleNode> vs{{0, 1795.0, 0, +1, 10.0}, {1, 3.0, 1, -1, 10.0}};
    stepMobility(vs, road, 1.0, rng, s);
    CHECK(vs[0].x == doctest::Approx(std::fmod(1795.0 + 10.0, 1800.0)));
    CHECK(vs[0].x == doctest::Approx(5.0));
    CHECK(vs[0].lane == 0);
    CHECK(vs[1].x == doctest::Approx(1793.0));
    CHECK(vs[1].lane == 1);
}

TEST_CASE("wrapPosition stays in [0, length)") {
    CHECK(wrapPosition(0.0, 1800.0) == 0.0);
    CHECK(wrapPosition(1800.0, 1800.0) == 0.0);
    CHECK(wrapPosition(-1e-18, 1800.0) < 1800.0);
    CHECK(wrapPosition(-10.0, 1800.0) == doctest::Approx(1790.0));
}

TEST_CASE("segmentOf boundaries") {
    RoadGeometry road;
    CHECK(segmentOf(0.0, road) == 0);
    CHECK(segmentOf(150.0, road) == 1);
    CHECK(segmentOf(1800.0, road) == 17);
    CHECK(segmentOf(1799.999, road) == 17);
    for (int k = 1; k < road.segmentCount; ++k) {
        const double edge = k * road.segmentLength;
        CHECK(segmentOf(edge, road) == k);
        CHECK(segmentOf(std::nextafter(edge, 0.0), road) == k - 1);
    }
    CHECK_THROWS_AS(segmentOf(-0.1, road), std::out_of_range);
    CHECK_THROWS_AS(segmentOf(1800.1, road), std::out_of_range);
}

TEST_CASE("speed and position bounds hold over a long random walk") {
    RoadGeometry road;
    MobilityParams p;
    RandomSource rng(3);
    const auto s = rng.registerStream("mobility");
    auto vs = initVehicles(road, 20, rng, s, p);
    for (int step = 0; step < 100'000; ++step) {
        stepMobility(vs, road, p.dt, rng, s, p);
        for (const auto& v : vs) {
            if (v.speed < 0.0 || v.speed > p.maxSpeed || v.x < 0.0 || v.x >= road.length) {
                FAIL("bound violated at step " << step);
            }
        }
    }
}

TEST_CASE("stepMobility rejects non-positive dt") {
    RoadGeometry road;
    RandomSource rng(1);
    const auto s = rng.registerStream("mobility");
    std::vector<VehicleNode> vs(1);
    CHECK_THROWS_AS(stepMobility(vs, road, 0.0, rng, s), std::invalid_argument);
}

TEST_CASE("road geometry validation") {
    RoadGeometry road;
    CHECK_NOTHROW(road.validate());
    road.segmentCount = 17;
    CHECK_THROWS_AS(road.validate(), std::invalid_argument);
    RoadGeometry bad;
    bad.lanes = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
