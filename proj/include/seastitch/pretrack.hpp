// Minimal two-stage confidence-based IoU tracker for turning raw detections
// into input tracklets. No motion model: the last seen box is carried forward.
#pragma once

#include <vector>

#include "seastitch/types.hpp"

namespace seastitch {

struct PretrackConfig {
    double high_conf{0.5};   // stage-1 eligibility
    double low_conf{0.1};    // below this detections are discarded
    double init_conf{0.2};   // unmatched detections above this start tracks
    int buffer_frames{100};  // track is closed after this many unmatched frames
    double iou_gate{0.5};    // minimum IoU for an association
};

/// Per frame and class: associates high-confidence detections with live tracks
/// first, then remaining low-confidence ones with still-unmatched tracks, on
/// cost 1 - IoU gated at 1 - iou_gate. Track ids are 1-based in creation
/// order.
std::vector<Tracklet> two_stage_track(const std::vector<Detection>& detections,
                                      const PretrackConfig& cfg = {});

}  // namespace seastitch
