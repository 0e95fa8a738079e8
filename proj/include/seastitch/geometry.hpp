// Estimated camera model: intrinsics from field-of-view, gimbal rotation,
// pixel-ray casting, sea-plane intersection and GPS-to-local conversion.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "seastitch/types.hpp"

namespace seastitch {

/// Mean spherical Earth radius used by the equirectangular approximation.
constexpr double kEarthRadius = 6371000.0;

/// K = [[f, 0, w/2], [0, f, h/2], [0, 0, 1]] with f = w / (2 tan(fov/2)).
Eigen::Matrix3d intrinsics_matrix(const CameraIntrinsics& cam);

/// Relative degrees -> local meters (x east, y north), equirectangular with
/// the meridian scale fixed at the origin latitude.
std::pair<double, double> gps_to_local(double lat_rel_deg, double lon_rel_deg,
                                       const ReferenceOrigin& origin);

/// Exact inverse of gps_to_local.
std::pair<double, double> local_to_gps(double x_east, double y_north,
                                       const ReferenceOrigin& origin);

/// Rotation whose columns are the camera basis (right, down, forward)
/// expressed in east-north-up world axes. Heading is compass degrees
/// clockwise from north, pitch is depression below the horizon; roll is zero.
Eigen::Matrix3d rotation_from_gimbal(double gimbal_heading_deg, double gimbal_pitch_deg);

/// Unit direction of the ray through pixel (u, v): normalize(R K^-1 [u v 1]).
Eigen::Vector3d pixel_ray(const Eigen::Matrix3d& K, const Eigen::Matrix3d& R,
                          double u, double v);

/// Intersection of a camera ray with the z = 0 sea plane. Empty when the ray
/// is horizontal or points upward (ray.z >= -1e-9).
std::optional<WorldPoint> ground_intersect(const WorldPoint& drone_pos,
                                           const Eigen::Vector3d& ray);

/// Drone position in world coordinates from a metadata record.
WorldPoint drone_position(const FrameMetadata& md, const ReferenceOrigin& origin);

/// Full image-to-world projection for one bounding-box center pixel.
std::optional<WorldPoint> project_detection(const FrameMetadata& md, double u, double v,
                                            const CameraIntrinsics& cam,
                                            const ReferenceOrigin& origin);

/// World-to-image projection; empty when the point is behind the camera.
std::optional<PixelPoint> forward_project(const WorldPoint& p, const FrameMetadata& md,
                                          const CameraIntrinsics& cam,
                                          const ReferenceOrigin& origin);

/// One stationary-target segment for FOV calibration: the bbox center pixel
/// of the same physical object observed under different drone poses.
struct CalibrationSegment {
    std::vector<std::pair<FrameMetadata, PixelPoint>> samples;
};

struct FovSearch {
    double lo_deg{30.0};
    double hi_deg{120.0};
    double step_deg{0.5};
};

/// Mean over segments of the per-segment positional standard deviation
/// (RMS planar distance from the segment centroid) of projected locations.
/// Infinite when any sample of any segment fails to intersect the sea plane.
double calibration_objective(const std::vector<CalibrationSegment>& segments,
                             const CameraIntrinsics& cam_template, double fov_deg,
                             const ReferenceOrigin& origin = {});

/// Grid search minimizing calibration_objective; ties resolve to the smaller
/// angle. Throws std::invalid_argument when no segments are given.
double calibrate_fov(const std::vector<CalibrationSegment>& segments,
                     const CameraIntrinsics& cam_template, const FovSearch& search,
                     const ReferenceOrigin& origin = {});

}  // namespace seastitch
