#include "seastitch/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "seastitch/kernels.hpp"

namespace seastitch {

Eigen::Matrix3d intrinsics_matrix(const CameraIntrinsics& cam) {
    const double f = cam.focal();
    Eigen::Matrix3d K;
    K << f, 0.0, cam.width / 2.0,
         0.0, f, cam.height / 2.0,
         0.0, 0.0, 1.0;
    return K;
}

std::pair<double, double> gps_to_local(double lat_rel_deg, double lon_rel_deg,
                                       const ReferenceOrigin& origin) {
    const double meters_per_deg = deg2rad(1.0) * kEarthRadius;
    const double y = lat_rel_deg * meters_per_deg;
    const double x = lon_rel_deg * meters_per_deg * std::cos(deg2rad(origin.latitude));
    return {x, y};
}

std::pair<double, double> local_to_gps(double x_east, double y_north,
                                       const ReferenceOrigin& origin) {
    const double meters_per_deg = deg2rad(1.0) * kEarthRadius;
    const double lat = y_north / meters_per_deg;
    const double lon = x_east / (meters_per_deg * std::cos(deg2rad(origin.latitude)));
    return {lat, lon};
}

Eigen::Matrix3d rotation_from_gimbal(double gimbal_heading_deg, double gimbal_pitch_deg) {
    const double alpha = deg2rad(90.0 - gimbal_heading_deg);
    const double theta = deg2rad(gimbal_pitch_deg);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double ct = std::cos(theta), st = std::sin(theta);

    // forward = optical axis depressed by pitch below the horizon,
    // right stays horizontal (zero roll), down = forward x right.
    const Eigen::Vector3d forward(ca * ct, sa * ct, -st);
    const Eigen::Vector3d right(sa, -ca, 0.0);
    const Eigen::Vector3d down = forward.cross(right);

    Eigen::Matrix3d R;
    R.col(0) = right;
    R.col(1) = down;
    R.col(2) = forward;
    return R;
}

Eigen::Vector3d pixel_ray(const Eigen::Matrix3d& K, const Eigen::Matrix3d& R,
                          double u, double v) {
    const double f = K(0, 0);
    // K^-1 [u v 1] in closed form; normalization happens after rotation so
    // the homogeneous pixel scale cannot bend the direction.
    const Eigen::Vector3d cam_dir((u - K(0, 2)) / f, (v - K(1, 2)) / K(1, 1), 1.0);
    return (R * cam_dir).normalized();
}

std::optional<WorldPoint> ground_intersect(const WorldPoint& drone_pos,
                                           const Eigen::Vector3d& ray) {
    constexpr double kEps = 1e-9;
    if (ray.z() >= -kEps) return std::nullopt;
    const double t = -drone_pos.z / ray.z();
    return WorldPoint{drone_pos.x + t * ray.x(), drone_pos.y + t * ray.y(), 0.0};
}

WorldPoint drone_position(const FrameMetadata& md, const ReferenceOrigin& origin) {
    const auto [x, y] = gps_to_local(md.gps_latitude, md.gps_longitude, origin);
    return WorldPoint{x, y, md.altitude};
}

std::optional<WorldPoint> project_detection(const FrameMetadata& md, double u, double v,
                                            const CameraIntrinsics& cam,
                                            const ReferenceOrigin& origin) {
    const Eigen::Matrix3d K = intrinsics_matrix(cam);
    const Eigen::Matrix3d R = rotation_from_gimbal(md.gimbal_heading, md.gimbal_pitch);
    return ground_intersect(drone_position(md, origin), pixel_ray(K, R, u, v));
}

std::optional<PixelPoint> forward_project(const WorldPoint& p, const FrameMetadata& md,
                                          const CameraIntrinsics& cam,
                                          const ReferenceOrigin& origin) {
    const Eigen::Matrix3d R = rotation_from_gimbal(md.gimbal_heading, md.gimbal_pitch);
    const WorldPoint dp = drone_position(md, origin);
    const Eigen::Vector3d rel(p.x - dp.x, p.y - dp.y, p.z - dp.z);
    const Eigen::Vector3d cam_pt = R.transpose() * rel;
    if (cam_pt.z() <= 0.0) return std::nullopt;
    const double f = cam.focal();
    return PixelPoint{f * cam_pt.x() / cam_pt.z() + cam.width / 2.0,
                      f * cam_pt.y() / cam_pt.z() + cam.height / 2.0};
}

double calibration_objective(const std::vector<CalibrationSegment>& segments,
                             const CameraIntrinsics& cam_template, double fov_deg,
                             const ReferenceOrigin& origin) {
    CameraIntrinsics cam = cam_template;
    cam.fov_deg = fov_deg;
    double sum = 0.0;
    for (const CalibrationSegment& seg : segments) {
        double cx = 0.0, cy = 0.0;
        std::vector<WorldPoint> pts;
        pts.reserve(seg.samples.size());
        for (const auto& [md, px] : seg.samples) {
            auto wp = project_detection(md, px.u, px.v, cam, origin);
            if (!wp) return std::numeric_limits<double>::infinity();
            cx += wp->x;
            cy += wp->y;
            pts.push_back(*wp);
        }
        cx /= pts.size();
        cy /= pts.size();
        double ss = 0.0;
        for (const WorldPoint& p : pts) {
            const double dx = p.x - cx, dy = p.y - cy;
            ss += dx * dx + dy * dy;
        }
        sum += std::sqrt(ss / pts.size());
    }
    return sum / segments.size();
}

double calibrate_fov(const std::vector<CalibrationSegment>& segments,
                     const CameraIntrinsics& cam_template, const FovSearch& search,
                     const ReferenceOrigin& origin) {
    if (segments.empty()) throw std::invalid_argument("calibrate_fov: no segments");
    for (const CalibrationSegment& seg : segments)
        if (seg.samples.size() < 2)
            throw std::invalid_argument("calibrate_fov: segment with fewer than 2 samples");

    const std::vector<double> grid = fov_grid(search);
    const std::vector<double> objective = calibration_grid(segments, cam_template, search, origin);
    // Strict improvement only, so ties resolve to the smallest angle.
    size_t best = 0;
    for (size_t i = 1; i < grid.size(); ++i)
        if (objective[i] < objective[best]) best = i;
    return grid[best];
}

}  // namespace seastitch
