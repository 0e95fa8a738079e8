#include "seastitch/postprocess.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace seastitch {

Tracklet interpolate_track(const Tracklet& t, int max_gap) {
    Tracklet out = t;
    out.obs.clear();
    out.obs.reserve(t.obs.size());
    for (std::size_t i = 0; i < t.obs.size(); ++i) {
        out.obs.push_back(t.obs[i]);
        if (i + 1 >= t.obs.size()) continue;
        const Observation& a = t.obs[i];
        const Observation& b = t.obs[i + 1];
        const int gap = b.frame - a.frame - 1;
        if (gap < 1 || gap > max_gap) continue;
        for (int k = 1; k <= gap; ++k) {
            const double s = static_cast<double>(k) / (gap + 1);
            Observation o;
            o.frame = a.frame + k;
            o.bbox = BBox{a.bbox.x + s * (b.bbox.x - a.bbox.x), a.bbox.y + s * (b.bbox.y - a.bbox.y),
                          a.bbox.w + s * (b.bbox.w - a.bbox.w), a.bbox.h + s * (b.bbox.h - a.bbox.h)};
            o.confidence = std::min(a.confidence, b.confidence);
            o.interpolated = true;
            out.obs.push_back(o);
        }
    }
    return out;
}

std::vector<Tracklet> interpolate_tracks(std::vector<Tracklet> tracklets, int max_gap) {
    for (auto& t : tracklets) t = interpolate_track(t, max_gap);
    return tracklets;
}

std::vector<Detection> area_nms(const std::vector<Detection>& dets, double nms_iou) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double area_a = dets[a].bbox.area();
        const double area_b = dets[b].bbox.area();
        if (area_a != area_b) return area_a > area_b;
        if (dets[a].confidence != dets[b].confidence) return dets[a].confidence > dets[b].confidence;
        return a < b;
    });
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        bool ok = true;
        for (std::size_t k : kept) {
            if (iou(dets[idx].bbox, dets[k].bbox) > nms_iou) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    std::vector<Detection> out;
    out.reserve(kept.size());
    for (std::size_t idx : kept) out.push_back(dets[idx]);
    return out;
}

std::vector<Detection> area_nms_per_frame(const std::vector<Detection>& dets, double nms_iou) {
    std::map<int, std::vector<Detection>> by_frame;
    for (const auto& d : dets) by_frame[d.frame].push_back(d);
    std::vector<Detection> out;
    out.reserve(dets.size());
    for (auto& [frame, fd] : by_frame) {
        auto kept = area_nms(fd, nms_iou);
        out.insert(out.end(), kept.begin(), kept.end());
    }
    return out;
}

}  // namespace seastitch
