#include "tcdgp/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tcdgp {

void RoadGeometry::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("road." + field + ": " + why);
    };
    if (!(length > 0)) fail("length", "must be positive");
    if (!(width > 0)) fail("width", "must be positive");
    if (lanes < 1) fail("lanes", "must be at least 1");
    if (!(segmentLength > 0)) fail("segment_length", "must be positive");
    if (segmentCount < 1) fail("segment_count", "must be at least 1");
    if (std::abs(segmentLength * segmentCount - length) > 1e-9 * length) {
        fail("segment_count", "segment_count * segment_length must equal length");
    }
}

std::vector<VehicleNode> initVehicles(const RoadGeometry& road, std::size_t n, RandomSource& rng,
                                      StreamId stream, const MobilityParams& params) {
    if (n == 0) throw std::invalid_argument("initVehicles: vehicle count must be at least 1");
    std::vector<VehicleNode> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        VehicleNode v;
        v.id = static_cast<NodeId>(i);
        v.x = wrapPosition(rng.uniform(stream, 0.0, road.length), road.length);
        v.lane = std::min(static_cast<int>(rng.next(stream) * road.lanes), road.lanes - 1);
        v.direction = laneDirection(v.lane);
        v.speed = rng.uniform(stream, 0.0, params.maxSpeed);
        v.currentReading = v.speed;
        out.push_back(v);
    }
    return out;
}

double wrapPosition(double x, double length) {
    double r = std::fmod(x, length);
    if (r < 0) r += length;
    // fmod of a tiny negative can round up to exactly length
    if (r >= length) r = 0.0;
    return r;
}

void stepMobility(std::span<VehicleNode> vehicles, const RoadGeometry& road, double dt,
                  RandomSource& rng, StreamId stream, const MobilityParams& params) {
    if (!(dt > 0)) throw std::invalid_argument("stepMobility: dt must be positive");
    for (auto& v : vehicles) {
        v.x = wrapPosition(v.x + v.direction * v.speed * dt, road.length);
        const double jitter = rng.uniform(stream, -params.speedJitter, params.speedJitter);
        v.speed = std::clamp(v.speed + jitter, 0.0, params.maxSpeed);
    }
}

int segmentOf(double x, const RoadGeometry& road) {
    if (!(x >= 0.0 && x <= road.length)) {
        throw std::out_of_range("segmentOf: x=" + std::to_string(x) + " is off the road");
    }
    const int seg = static_cast<int>(std::floor(x / road.segmentLength));
    return std::min(seg, road.segmentCount - 1);
}

}  // namespace tcdgp
