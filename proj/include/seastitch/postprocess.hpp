// Track gap interpolation (run before and after ReID) and area-prioritized
// non-maximum suppression.
#pragma once

#include <vector>

#include "seastitch/types.hpp"

namespace seastitch {

struct PostConfig {
    int max_gap{30};      // longest gap (missing frames) filled by interpolation
    double nms_iou{0.7};  // boxes overlapping a kept box above this are dropped
    bool pre_reid{true};  // interpolation pass before stitching
    bool post_reid{true};  // interpolation pass after stitching
};

/// Fills every internal gap of at most max_gap missing frames with linearly
/// interpolated boxes (confidence = min of the flanking observations,
/// interpolated flag set). Original observations are preserved bit-identically.
Tracklet interpolate_track(const Tracklet& t, int max_gap);

std::vector<Tracklet> interpolate_tracks(std::vector<Tracklet> tracklets, int max_gap);

/// NMS over one frame's detections, class-agnostic: larger boxes are kept in
/// preference to smaller ones (ties: higher confidence, then input order); a
/// box is kept iff its IoU with every already-kept box is <= nms_iou. Kept
/// detections are returned in input order.
std::vector<Detection> area_nms(const std::vector<Detection>& dets, double nms_iou);

/// Applies area_nms independently to each frame of a mixed detection list.
std::vector<Detection> area_nms_per_frame(const std::vector<Detection>& dets, double nms_iou);

}  // namespace seastitch
