// Data-parallel kernels (OpenMP) with serial reference implementations.
// Every parallel kernel writes each output element independently, so serial
// and parallel paths produce identical results; the test suite checks this
// and the bench tool compares their throughput.
#pragma once

#include <optional>
#include <vector>

#include "seastitch/geometry.hpp"
#include "seastitch/types.hpp"

namespace seastitch {

struct ProjectionJob {
    int frame{0};
    double u{0.0};
    double v{0.0};
};

std::vector<std::optional<WorldPoint>> project_batch_serial(
    const std::vector<ProjectionJob>& jobs, const MetadataSequence& metadata,
    const CameraIntrinsics& cam, const ReferenceOrigin& origin);

/// threads == 0 picks the OpenMP default; falls back to the serial path when
/// built without OpenMP.
std::vector<std::optional<WorldPoint>> project_batch_parallel(
    const std::vector<ProjectionJob>& jobs, const MetadataSequence& metadata,
    const CameraIntrinsics& cam, const ReferenceOrigin& origin, int threads = 0);

/// Candidate angles lo, lo+step, ... up to and including hi.
std::vector<double> fov_grid(const FovSearch& search);

std::vector<double> calibration_grid_serial(const std::vector<CalibrationSegment>& segments,
                                            const CameraIntrinsics& cam_template,
                                            const FovSearch& search,
                                            const ReferenceOrigin& origin = {});

std::vector<double> calibration_grid_parallel(const std::vector<CalibrationSegment>& segments,
                                              const CameraIntrinsics& cam_template,
                                              const FovSearch& search,
                                              const ReferenceOrigin& origin = {},
                                              int threads = 0);

/// Dispatcher used by calibrate_fov: parallel when available, else serial.
std::vector<double> calibration_grid(const std::vector<CalibrationSegment>& segments,
                                     const CameraIntrinsics& cam_template,
                                     const FovSearch& search,
                                     const ReferenceOrigin& origin = {});

/// Computes the world point of every observation center in place.
/// Throws MetadataGapError when a referenced frame has no metadata record.
void annotate_world_points(std::vector<Tracklet>& tracklets, const MetadataSequence& metadata,
                           const CameraIntrinsics& cam, const ReferenceOrigin& origin,
                           int threads = 0);

}  // namespace seastitch
