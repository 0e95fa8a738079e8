// CLEAR-MOT and identity metrics for scoring stitched tracks against ground
// truth.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seastitch/types.hpp"

namespace seastitch {

class FrameRangeMismatch : public std::runtime_error {
  public:
    explicit FrameRangeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct EvalResult {
    double idf1{0.0};
    double idp{0.0};
    double idr{0.0};
    double mota{0.0};
    double recall{0.0};
    double precision{0.0};
    long long fp{0};
    long long fn{0};
    long long idsw{0};
    long long frag{0};
    int mt{0};
    int ml{0};
    long long tp{0};
    long long idtp{0};
    long long idfp{0};
    long long idfn{0};
    long long gt_total{0};    // ground-truth boxes
    long long pred_total{0};  // predicted boxes
    int gt_tracks{0};
    int pred_tracks{0};
};

/// One frame of CLEAR matching: correspondences from prev (gt id -> pred id)
/// are carried over while their IoU stays at or above the threshold; the
/// remaining boxes are matched by gated assignment on cost 1 - IoU. Returns
/// this frame's gt id -> pred id map.
std::map<int, int> frame_match(const std::vector<std::pair<int, BBox>>& gt,
                               const std::vector<std::pair<int, BBox>>& pred,
                               double iou_threshold = 0.5, const std::map<int, int>& prev = {});

/// Full evaluation. CLEAR counts (FP/FN/IDSW/Frag, MOTA) come from the
/// frame_match stream; identity measures from one global min-cost matching
/// between whole trajectories; MT/ML at 80%/20% coverage. Class-agnostic
/// unless class_aware is set. Throws FrameRangeMismatch when predictions
/// carry frames outside the ground-truth frame range, std::invalid_argument
/// when the ground truth is empty.
EvalResult evaluate(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred,
                    double iou_threshold = 0.5, bool class_aware = false);

/// Flat `key=value` lines, one metric per line, fixed order.
std::string to_kv(const EvalResult& r);

}  // namespace seastitch
