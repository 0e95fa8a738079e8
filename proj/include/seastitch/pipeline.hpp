// End-to-end wiring: detections -> NMS -> two-stage tracker -> interpolation
// -> stitching -> interpolation. Each stage can be toggled off.
#pragma once

#include <string>
#include <vector>

#include "seastitch/io.hpp"
#include "seastitch/postprocess.hpp"
#include "seastitch/pretrack.hpp"
#include "seastitch/reid.hpp"

namespace seastitch {

struct PipelineOptions {
    bool short_term{true};  // short-term re-association pass
    bool long_term{true};   // long-term re-association pass
    bool interpolate{true};  // master switch for both gap-interpolation passes
    int jobs{0};             // threads for world-point projection; 0 = default
};

struct PipelineResult {
    std::vector<Tracklet> tracklets;
    StitchReport report;
    std::size_t input_detections{0};   // detections surviving NMS (0 for tracklet input)
    std::size_t input_tracklets{0};    // tracklets entering the stitcher
};

// Full pipeline from raw per-frame detections.
PipelineResult run_pipeline(const std::vector<Detection>& detections,
                            const MetadataSequence& metadata, const PipelineConfig& cfg,
                            const PipelineOptions& opts = {});

// Same pipeline entered with pre-built tracklets (NMS and pretracking skipped).
PipelineResult run_pipeline(std::vector<Tracklet> tracklets, const MetadataSequence& metadata,
                            const PipelineConfig& cfg, const PipelineOptions& opts = {});

// Merge-report JSON: per-pass merge counts, per-class breakdown, chain list.
std::string report_to_json(const PipelineResult& result);

}  // namespace seastitch
