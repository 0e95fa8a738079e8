#include "seastitch/pretrack.hpp"

#include <algorithm>
#include <map>

#include "seastitch/assignment.hpp"

namespace seastitch {
namespace {

struct Track {
    Tracklet t;
    int last_frame{0};
    BBox last_box{};
};

// Gated assignment of detections to tracks on cost 1 - IoU. Returns the track
// index matched to each detection, or -1. Matched track indices are removed
// from `track_ids` so the next stage only sees still-unmatched tracks.
std::vector<int> associate(const std::vector<Track>& tracks, std::vector<std::size_t>& track_ids,
                           const std::vector<const Detection*>& dets, double iou_gate) {
    std::vector<int> det_track(dets.size(), -1);
    const double gate = 1.0 - iou_gate;
    if (track_ids.empty() || dets.empty() || gate <= 0.0) return det_track;

    CostMatrix m(static_cast<int>(track_ids.size()), static_cast<int>(dets.size()));
    m.gate = gate;
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            m.at(r, c) = 1.0 - iou(tracks[track_ids[static_cast<std::size_t>(r)]].last_box,
                                   dets[static_cast<std::size_t>(c)]->bbox);
        }
    }
    const Matching result = solve_gated(m);
    std::vector<char> row_used(track_ids.size(), 0);
    for (const auto& [r, c] : result.pairs) {
        det_track[static_cast<std::size_t>(c)] = static_cast<int>(track_ids[static_cast<std::size_t>(r)]);
        row_used[static_cast<std::size_t>(r)] = 1;
    }
    std::vector<std::size_t> remaining;
    for (std::size_t r = 0; r < track_ids.size(); ++r) {
        if (!row_used[r]) remaining.push_back(track_ids[r]);
    }
    track_ids = std::move(remaining);
    return det_track;
}

}  // namespace

std::vector<Tracklet> two_stage_track(const std::vector<Detection>& detections,
                                      const PretrackConfig& cfg) {
    // Group per frame preserving input order within a frame.
    std::map<int, std::vector<const Detection*>> by_frame;
    for (const auto& d : detections) {
        if (d.confidence < cfg.low_conf) continue;
        by_frame[d.frame].push_back(&d);
    }

    std::vector<Track> tracks;
    for (const auto& [frame, frame_dets] : by_frame) {
        std::map<int, std::vector<const Detection*>> by_class;
        for (const Detection* d : frame_dets) by_class[d->class_id].push_back(d);

        for (const auto& [cls, dets] : by_class) {
            std::vector<std::size_t> live;
            for (std::size_t i = 0; i < tracks.size(); ++i) {
                if (tracks[i].t.class_id == cls && frame - tracks[i].last_frame <= cfg.buffer_frames) {
                    live.push_back(i);
                }
            }
            std::vector<const Detection*> high, low;
            for (const Detection* d : dets) {
                (d->confidence >= cfg.high_conf ? high : low).push_back(d);
            }

            const auto high_track = associate(tracks, live, high, cfg.iou_gate);
            const auto low_track = associate(tracks, live, low, cfg.iou_gate);

            const auto commit = [&](const std::vector<const Detection*>& stage,
                                    const std::vector<int>& matched) {
                for (std::size_t i = 0; i < stage.size(); ++i) {
                    const Detection* d = stage[i];
                    if (matched[i] >= 0) {
                        Track& tr = tracks[static_cast<std::size_t>(matched[i])];
                        tr.t.obs.push_back({d->frame, d->bbox, d->confidence});
                        tr.last_frame = d->frame;
                        tr.last_box = d->bbox;
                    } else if (d->confidence > cfg.init_conf) {
                        Track tr;
                        tr.t.id = static_cast<int>(tracks.size()) + 1;
                        tr.t.class_id = cls;
                        tr.t.obs.push_back({d->frame, d->bbox, d->confidence});
                        tr.last_frame = d->frame;
                        tr.last_box = d->bbox;
                        tracks.push_back(std::move(tr));
                    }
                }
            };
            commit(high, high_track);
            commit(low, low_track);
        }
    }

    std::vector<Tracklet> out;
    out.reserve(tracks.size());
    for (auto& tr : tracks) out.push_back(std::move(tr.t));
    return out;
}

}  // namespace seastitch
