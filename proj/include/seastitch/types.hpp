// Core domain types shared across the stitching pipeline.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace seastitch {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Shortest-arc interpolation between compass headings; result in [0, 360).
inline double circular_lerp_deg(double a, double b, double s) {
    const double delta = std::fmod(b - a + 540.0, 360.0) - 180.0;
    return std::fmod(a + s * delta + 360.0, 360.0);
}

/// Axis-aligned box, top-left pixel convention.
struct BBox {
    double x{0.0};
    double y{0.0};
    double w{0.0};
    double h{0.0};

    double cx() const { return x + 0.5 * w; }
    double cy() const { return y + 0.5 * h; }
    double area() const { return w * h; }
};

/// Intersection-over-union of two boxes; 0 when disjoint or degenerate.
inline double iou(const BBox& a, const BBox& b) {
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    // Rounding in (x + w) - x can push inter past the true overlap area for
    // identical boxes; clamp the union so the ratio never exceeds 1.
    const double uni = std::max(a.area() + b.area() - inter, inter);
    return uni > 0.0 ? inter / uni : 0.0;
}

struct PixelPoint {
    double u{0.0};
    double v{0.0};
};

/// Local east-north-up coordinates in meters; the sea surface is z = 0.
struct WorldPoint {
    double x{0.0};
    double y{0.0};
    double z{0.0};
};

inline double planar_distance(const WorldPoint& a, const WorldPoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct Detection {
    int frame{0};
    BBox bbox;
    double confidence{1.0};
    int class_id{0};
};

struct Observation {
    int frame{0};
    BBox bbox;
    double confidence{1.0};
    std::optional<WorldPoint> world;
    bool interpolated{false};
};

/// A contiguous identity fragment: one id, observations sorted strictly by frame.
struct Tracklet {
    int id{0};
    int class_id{0};
    std::vector<Observation> obs;

    int entry_frame() const { return obs.front().frame; }
    int exit_frame() const { return obs.back().frame; }
    int span() const { return exit_frame() - entry_frame(); }
};

/// Per-frame drone state. Latitude/longitude are degrees relative to the
/// reference center; gimbal_pitch is depression below the horizon and
/// gimbal_heading is compass degrees clockwise from north.
struct FrameMetadata {
    int frame_index{0};
    double gps_latitude{0.0};
    double gps_longitude{0.0};
    double altitude{0.0};
    double gimbal_pitch{0.0};
    double gimbal_heading{0.0};
    double x_speed{0.0};
    double y_speed{0.0};
    double z_speed{0.0};
};

struct CameraIntrinsics {
    double fov_deg{70.0};
    int width{3840};
    int height{2160};

    double focal() const { return width / (2.0 * std::tan(deg2rad(fov_deg) / 2.0)); }
};

struct ReferenceOrigin {
    double latitude{47.6};
    double longitude{9.2};
};

struct MetadataGapError : std::runtime_error {
    explicit MetadataGapError(int frame)
        : std::runtime_error("no metadata record for frame " + std::to_string(frame)),
          frame(frame) {}
    int frame;
};

/// Frame-indexed metadata lookup. Records are kept sorted by frame_index.
class MetadataSequence {
public:
    MetadataSequence() = default;
    explicit MetadataSequence(std::vector<FrameMetadata> records) { assign(std::move(records)); }

    void assign(std::vector<FrameMetadata> records) {
        records_ = std::move(records);
        std::sort(records_.begin(), records_.end(),
                  [](const FrameMetadata& a, const FrameMetadata& b) {
                      return a.frame_index < b.frame_index;
                  });
        index_.clear();
        index_.reserve(records_.size());
        for (size_t i = 0; i < records_.size(); ++i) index_[records_[i].frame_index] = i;
    }

    const FrameMetadata* find(int frame) const {
        auto it = index_.find(frame);
        return it == index_.end() ? nullptr : &records_[it->second];
    }

    /// Lookup that throws MetadataGapError when the frame is absent.
    const FrameMetadata& at(int frame) const {
        const FrameMetadata* md = find(frame);
        if (!md) throw MetadataGapError(frame);
        return *md;
    }

    const std::vector<FrameMetadata>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    size_t size() const { return records_.size(); }

private:
    std::vector<FrameMetadata> records_;
    std::unordered_map<int, size_t> index_;
};

}  // namespace seastitch
