#include "seastitch/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seastitch {
namespace {

#ifdef _OPENMP
int resolve_threads(int threads) {
    return threads > 0 ? threads : omp_get_max_threads();
}
#endif

// Resolves every job's metadata up front so lookup failures surface as a
// MetadataGapError before any parallel region starts.
std::vector<const FrameMetadata*> resolve_metadata(const std::vector<ProjectionJob>& jobs,
                                                   const MetadataSequence& metadata) {
    std::vector<const FrameMetadata*> out;
    out.reserve(jobs.size());
    for (const auto& job : jobs) {
        out.push_back(&metadata.at(job.frame));
    }
    return out;
}

}  // namespace

std::vector<std::optional<WorldPoint>> project_batch_serial(const std::vector<ProjectionJob>& jobs,
                                                            const MetadataSequence& metadata,
                                                            const CameraIntrinsics& cam,
                                                            const ReferenceOrigin& origin) {
    const auto records = resolve_metadata(jobs, metadata);
    std::vector<std::optional<WorldPoint>> out(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        out[i] = project_detection(*records[i], jobs[i].u, jobs[i].v, cam, origin);
    }
    return out;
}

std::vector<std::optional<WorldPoint>> project_batch_parallel(
    const std::vector<ProjectionJob>& jobs, const MetadataSequence& metadata,
    const CameraIntrinsics& cam, const ReferenceOrigin& origin, int threads) {
#ifdef _OPENMP
    const auto records = resolve_metadata(jobs, metadata);
    std::vector<std::optional<WorldPoint>> out(jobs.size());
    const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] =
            project_detection(*records[static_cast<std::size_t>(i)], jobs[static_cast<std::size_t>(i)].u,
                              jobs[static_cast<std::size_t>(i)].v, cam, origin);
    }
    return out;
#else
    (void)threads;
    return project_batch_serial(jobs, metadata, cam, origin);
#endif
}

std::vector<double> fov_grid(const FovSearch& search) {
    std::vector<double> out;
    if (search.step_deg <= 0.0 || search.hi_deg < search.lo_deg) {
        return out;
    }
    const auto count =
        static_cast<std::size_t>(std::floor((search.hi_deg - search.lo_deg) / search.step_deg + 1e-9)) + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(search.lo_deg + static_cast<double>(i) * search.step_deg);
    }
    return out;
}

std::vector<double> calibration_grid_serial(const std::vector<CalibrationSegment>& segments,
                                            const CameraIntrinsics& cam_template,
                                            const FovSearch& search, const ReferenceOrigin& origin) {
    const auto candidates = fov_grid(search);
    std::vector<double> out(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        out[i] = calibration_objective(segments, cam_template, candidates[i], origin);
    }
    return out;
}

std::vector<double> calibration_grid_parallel(const std::vector<CalibrationSegment>& segments,
                                              const CameraIntrinsics& cam_template,
                                              const FovSearch& search, const ReferenceOrigin& origin,
                                              int threads) {
#ifdef _OPENMP
    const auto candidates = fov_grid(search);
    std::vector<double> out(candidates.size());
    const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] =
            calibration_objective(segments, cam_template, candidates[static_cast<std::size_t>(i)], origin);
    }
    return out;
#else
    (void)threads;
    return calibration_grid_serial(segments, cam_template, search, origin);
#endif
}

std::vector<double> calibration_grid(const std::vector<CalibrationSegment>& segments,
                                     const CameraIntrinsics& cam_template, const FovSearch& search,
                                     const ReferenceOrigin& origin) {
#ifdef _OPENMP
    return calibration_grid_parallel(segments, cam_template, search, origin);
#else
    return calibration_grid_serial(segments, cam_template, search, origin);
#endif
}

void annotate_world_points(std::vector<Tracklet>& tracklets, const MetadataSequence& metadata,
                           const CameraIntrinsics& cam, const ReferenceOrigin& origin, int threads) {
    // Flatten to (tracklet, observation) indices so one loop covers all work.
    std::vector<std::pair<std::size_t, std::size_t>> items;
    for (std::size_t t = 0; t < tracklets.size(); ++t) {
        for (std::size_t o = 0; o < tracklets[t].obs.size(); ++o) {
            items.emplace_back(t, o);
        }
    }
    std::vector<const FrameMetadata*> records(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& obs = tracklets[items[i].first].obs[items[i].second];
        records[i] = &metadata.at(obs.frame);
    }
    const auto n = static_cast<std::ptrdiff_t>(items.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
#else
    (void)threads;
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        auto& obs = tracklets[items[idx].first].obs[items[idx].second];
        obs.world = project_detection(*records[idx], obs.bbox.cx(), obs.bbox.cy(), cam, origin);
    }
}

}  // namespace seastitch
