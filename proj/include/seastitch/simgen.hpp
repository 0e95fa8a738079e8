// Deterministic synthetic scenario generator: a drone flight over sea-plane
// objects rendered through the forward camera model, with controlled
// fragmentation, dropouts, and pixel noise. Frames are 1-based to match the
// track file format.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "seastitch/types.hpp"

namespace seastitch {

class InvalidSpec : public std::runtime_error {
  public:
    explicit InvalidSpec(const std::string& what) : std::runtime_error(what) {}
};

struct Waypoint {
    int frame{1};
    double x{0.0};  // meters east
    double y{0.0};  // meters north
    double altitude{50.0};
};

struct GimbalKey {
    int frame{1};
    double pitch_deg{90.0};    // depression below horizon
    double heading_deg{0.0};   // compass, clockwise from north
};

struct VelocityKey {
    int frame{1};
    double vx{0.0};  // m/s east
    double vy{0.0};  // m/s north
};

struct ObjectSpec {
    int class_id{0};
    double x{0.0};
    double y{0.0};
    double vx{0.0};
    double vy{0.0};
    std::vector<VelocityKey> maneuvers;  // velocity changes, sorted by frame
};

/// Suppresses detections of one object (or all, object == -1) in [begin, end).
struct FragmentWindow {
    int begin{1};
    int end{1};
    int object{-1};
};

struct ScenarioSpec {
    int duration{1};  // frames, 1..duration inclusive
    double fps{30.0};
    std::vector<Waypoint> waypoints;
    std::vector<GimbalKey> gimbal;
    std::vector<ObjectSpec> objects;
    double dropout{0.0};  // per-detection drop probability
    std::vector<FragmentWindow> fragments;
    double noise_px{0.0};  // bbox position noise sigma
    double conf_base{0.9};
    double conf_jitter{0.05};
    std::uint64_t seed{1};
    CameraIntrinsics camera{};
    ReferenceOrigin origin{};
};

struct SimOutput {
    std::vector<Tracklet> gt;  // one track per object, gaps while out of view
    std::vector<Detection> detections;
    MetadataSequence metadata;
};

/// Physical footprint in meters used to size a class's boxes.
double class_footprint(int class_id);

/// Renders the scenario. Ground-truth boxes are emitted only when fully inside
/// the image, so their centers match the forward projection exactly.
/// Byte-identical output for identical spec + seed. Throws InvalidSpec.
SimOutput generate(const ScenarioSpec& spec);

/// JSON scenario file; unknown keys are rejected.
ScenarioSpec read_scenario(const std::string& path);

}  // namespace seastitch
