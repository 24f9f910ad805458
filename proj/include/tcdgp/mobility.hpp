#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "tcdgp/engine.hpp"
#include "tcdgp/types.hpp"

namespace tcdgp {

// Straight road along +x starting at the origin. Lane k occupies the strip
// y in [k * width / lanes, (k + 1) * width / lanes).
struct RoadGeometry {
    double length = 1800.0;
    double width = 15.0;
    int lanes = 2;
    double segmentLength = 100.0;
    int segmentCount = 18;
    Vec2 baseStation{0.0, 7.5};
    double mapSize = 2500.0;  // recorded only; the road sits inside the map

    double laneCenter(int lane) const { return width / lanes * (lane + 0.5); }
    double diagonal() const { return std::hypot(length, width); }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Lane 0 travels +x, lane 1 travels -x, alternating for wider roads.
inline int laneDirection(int lane) { return lane % 2 == 0 ? +1 : -1; }

struct VehicleNode {
    NodeId id = 0;
    double x = 0.0;
    int lane = 0;
    int direction = +1;
    double speed = 0.0;
    double residualEnergy = 1.0;
    NodeState state = NodeState::Sensing;
    double currentReading = 0.0;

    Vec2 position(const RoadGeometry& road) const { return {x, road.laneCenter(lane)}; }
};

struct MobilityParams {
    double maxSpeed = 30.0;
    double speedJitter = 1.0;  // per-step perturbation is uniform in +/- speedJitter
    double dt = 0.5;
};

// Throws std::invalid_argument when n == 0.
std::vector<VehicleNode> initVehicles(const RoadGeometry& road, std::size_t n, RandomSource& rng,
                                      StreamId stream, const MobilityParams& params = {});

// Kinematic step with the current speed, then a bounded random walk on speed.
// A vehicle running off either end reappears at the opposite end of its lane.
void stepMobility(std::span<VehicleNode> vehicles, const RoadGeometry& road, double dt,
                  RandomSource& rng, StreamId stream, const MobilityParams& params = {});

// x wrapped into [0, length).
double wrapPosition(double x, double length);

// floor(x / segmentLength), with x == length mapped to the last segment.
// Throws std::out_of_range for x off the road.
int segmentOf(double x, const RoadGeometry& road);

}  // namespace tcdgp
