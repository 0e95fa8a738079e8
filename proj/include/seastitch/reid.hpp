// Short- and long-term tracklet re-identification driven by world-coordinate
// distances: memory bank of exited tracks, exit/entry velocity estimation,
// constant-velocity extrapolation and gap-dependent gate expansion.
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "seastitch/geometry.hpp"
#include "seastitch/types.hpp"

namespace seastitch {

enum class TerminationKind { BorderExit, MidImageLoss };

struct Velocity2 {
    double vx{0.0};
    double vy{0.0};
};

struct ReidConfig {
    std::map<int, double> tau_match_by_class{{0, 10.0}, {1, 30.0}};  // meters
    double tau_match_default{10.0};
    std::map<int, double> tau_memory_by_class{};  // frames
    double tau_memory_default{300.0};
    double lambda{0.01};       // gate expansion per frame of gap
    int velocity_window{10};   // frames
    double border_margin{50.0};  // pixels
    int image_width{3840};
    int image_height{2160};

    double tau_match(int class_id) const {
        const auto it = tau_match_by_class.find(class_id);
        return it != tau_match_by_class.end() ? it->second : tau_match_default;
    }
    double tau_memory(int class_id) const {
        const auto it = tau_memory_by_class.find(class_id);
        return it != tau_memory_by_class.end() ? it->second : tau_memory_default;
    }
};

struct ExitState {
    WorldPoint exit_world{};
    Velocity2 velocity{};
    int exit_frame{0};
    TerminationKind termination{TerminationKind::MidImageLoss};
};

struct MergeRecord {
    int pass{0};  // 0 = short-term, 1 = long-term
    int class_id{0};
    int into_id{0};
    int absorbed_id{0};
    int entry_frame{0};
    int gap{0};
    double cost{0.0};  // meters, at merge time
    double gate{0.0};  // meters, effective gate for this pair
};

struct StitchReport {
    int short_term_merges{0};
    int long_term_merges{0};
    std::map<int, int> short_term_by_class;
    std::map<int, int> long_term_by_class;
    std::vector<MergeRecord> merges;
};

struct StitchOptions {
    bool short_term{true};
    bool long_term{true};
    int jobs{0};  // threads for world-point annotation; 0 = library default
};

struct StitchResult {
    std::vector<Tracklet> tracklets;
    StitchReport report;
};

/// Mean planar velocity over the last `w` frames of the tracklet (fewer when
/// the tracklet is shorter), using observations that carry world points.
/// Returns zero when fewer than two usable anchors exist.
Velocity2 exit_velocity(const Tracklet& t, int w);

/// Mirror of exit_velocity over the head of the tracklet. Points in the
/// direction of travel, so backward extrapolation subtracts it.
Velocity2 entry_velocity(const Tracklet& t, int w);

/// Constant-velocity forward extrapolation by dt frames; std::nullopt when the
/// state has expired (dt >= tau_memory, strict).
std::optional<WorldPoint> extrapolate(const ExitState& state, int dt, double tau_memory);

/// Gap-expanded matching gate: tau_match * max(1, lambda * (dt_exit + dt_entry)).
double expanded_threshold(double tau_match, double lambda, double dt_exit, double dt_entry);

/// BorderExit when the last box touches the border margin band or its world
/// point falls outside the next frame's view; MidImageLoss otherwise.
TerminationKind classify_termination(const Tracklet& t, const MetadataSequence& metadata,
                                     const CameraIntrinsics& cam, const ReidConfig& cfg,
                                     const ReferenceOrigin& origin = {});

/// Merges tracklets that vanished mid-image with later tracklets entering
/// within tau_match meters of the exit point (no extrapolation). Requires
/// world points to be annotated.
std::vector<Tracklet> short_term_pass(std::vector<Tracklet> tracklets,
                                      const MetadataSequence& metadata,
                                      const CameraIntrinsics& cam, const ReidConfig& cfg,
                                      const ReferenceOrigin& origin = {},
                                      StitchReport* report = nullptr);

/// Merges border-exited tracklets with re-entering ones by meeting
/// constant-velocity extrapolations at the re-entry frame under the expanded
/// gate. Requires world points to be annotated.
std::vector<Tracklet> long_term_pass(std::vector<Tracklet> tracklets,
                                     const MetadataSequence& metadata,
                                     const CameraIntrinsics& cam, const ReidConfig& cfg,
                                     const ReferenceOrigin& origin = {},
                                     StitchReport* report = nullptr);

/// Full stitch: annotates world points (throws MetadataGapError on a missing
/// metadata record), runs the short- then long-term pass per class, and
/// renumbers ids densely from 1 in order of first appearance. Observations are
/// never altered, dropped, or created — only id labels change.
StitchResult stitch(std::vector<Tracklet> tracklets, const MetadataSequence& metadata,
                    const CameraIntrinsics& cam, const ReidConfig& cfg,
                    const ReferenceOrigin& origin = {}, const StitchOptions& options = {});

}  // namespace seastitch
