#include "seastitch/pipeline.hpp"

#include <utility>

#include "json.hpp"

namespace seastitch {

namespace {

PipelineResult stitch_stage(std::vector<Tracklet> tracklets, const MetadataSequence& metadata,
                            const PipelineConfig& cfg, const PipelineOptions& opts,
                            std::size_t input_detections) {
    PipelineResult result;
    result.input_detections = input_detections;
    result.input_tracklets = tracklets.size();

    if (opts.interpolate && cfg.post.pre_reid) {
        tracklets = interpolate_tracks(std::move(tracklets), cfg.post.max_gap);
    }

    StitchOptions so;
    so.short_term = opts.short_term;
    so.long_term = opts.long_term;
    so.jobs = opts.jobs;
    StitchResult stitched =
        stitch(std::move(tracklets), metadata, cfg.camera, cfg.reid, cfg.origin, so);
    result.report = std::move(stitched.report);
    result.tracklets = std::move(stitched.tracklets);

    if (opts.interpolate && cfg.post.post_reid) {
        result.tracklets = interpolate_tracks(std::move(result.tracklets), cfg.post.max_gap);
    }
    return result;
}

}  // namespace

PipelineResult run_pipeline(const std::vector<Detection>& detections,
                            const MetadataSequence& metadata, const PipelineConfig& cfg,
                            const PipelineOptions& opts) {
    std::vector<Detection> kept = area_nms_per_frame(detections, cfg.post.nms_iou);
    std::vector<Tracklet> tracklets = two_stage_track(kept, cfg.pretrack);
    return stitch_stage(std::move(tracklets), metadata, cfg, opts, kept.size());
}

PipelineResult run_pipeline(std::vector<Tracklet> tracklets, const MetadataSequence& metadata,
                            const PipelineConfig& cfg, const PipelineOptions& opts) {
    return stitch_stage(std::move(tracklets), metadata, cfg, opts, 0);
}

std::string report_to_json(const PipelineResult& result) {
    nlohmann::ordered_json j;
    j["input_detections"] = result.input_detections;
    j["input_tracklets"] = result.input_tracklets;
    j["output_tracks"] = result.tracklets.size();
    j["short_term_merges"] = result.report.short_term_merges;
    j["long_term_merges"] = result.report.long_term_merges;
    auto by_class = [](const std::map<int, int>& m) {
        nlohmann::ordered_json o = nlohmann::ordered_json::object();
        for (const auto& [cls, n] : m) o[std::to_string(cls)] = n;
        return o;
    };
    j["short_term_by_class"] = by_class(result.report.short_term_by_class);
    j["long_term_by_class"] = by_class(result.report.long_term_by_class);
    nlohmann::ordered_json merges = nlohmann::ordered_json::array();
    for (const MergeRecord& m : result.report.merges) {
        nlohmann::ordered_json e;
        e["pass"] = m.pass == 0 ? "short_term" : "long_term";
        e["class_id"] = m.class_id;
        e["into_id"] = m.into_id;
        e["absorbed_id"] = m.absorbed_id;
        e["entry_frame"] = m.entry_frame;
        e["gap"] = m.gap;
        e["cost"] = m.cost;
        e["gate"] = m.gate;
        merges.push_back(std::move(e));
    }
    j["merges"] = std::move(merges);
    return j.dump(2) + "\n";
}

}  // namespace seastitch
