// Throughput comparison of the serial reference kernels against the OpenMP
// paths: batch pixel-to-world projection and the FOV calibration grid.
// Also verifies that both paths agree element for element.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "seastitch/geometry.hpp"
#include "seastitch/kernels.hpp"

using namespace seastitch;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

MetadataSequence make_metadata(int frames, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::vector<FrameMetadata> records(frames);
    for (int i = 0; i < frames; ++i) {
        FrameMetadata& md = records[i];
        md.frame_index = i + 1;
        md.gps_latitude = 47.6 + 1e-6 * i;
        md.gps_longitude = 9.2 + 2e-6 * i;
        md.altitude = 50.0 + jitter(rng);
        md.gimbal_pitch = 55.0 + jitter(rng);
        md.gimbal_heading = std::fmod(0.2 * i, 360.0);
        md.x_speed = 1.0;
        md.y_speed = 0.5;
        md.z_speed = 0.0;
    }
    return MetadataSequence(std::move(records));
}

}  // namespace

int main() {
    std::mt19937_64 rng(7);
    const CameraIntrinsics cam{};
    const ReferenceOrigin origin{};

    // --- batch projection ---
    const int frames = 1000;
    const MetadataSequence metadata = make_metadata(frames, rng);
    std::uniform_int_distribution<int> frame_dist(1, frames);
    std::uniform_real_distribution<double> u_dist(0.0, cam.width);
    std::uniform_real_distribution<double> v_dist(0.0, cam.height);
    std::vector<ProjectionJob> jobs(2'000'000);
    for (auto& j : jobs) j = {frame_dist(rng), u_dist(rng), v_dist(rng)};

    auto t0 = Clock::now();
    const auto serial = project_batch_serial(jobs, metadata, cam, origin);
    const double proj_serial_ms = ms_since(t0);

    t0 = Clock::now();
    const auto parallel = project_batch_parallel(jobs, metadata, cam, origin);
    const double proj_parallel_ms = ms_since(t0);

    double max_diff = 0.0;
    for (size_t i = 0; i < jobs.size(); ++i) {
        if (serial[i].has_value() != parallel[i].has_value()) {
            std::fprintf(stderr, "mismatch: hit/miss disagreement at job %zu\n", i);
            return 1;
        }
        if (serial[i]) {
            max_diff = std::max(max_diff, std::abs(serial[i]->x - parallel[i]->x));
            max_diff = std::max(max_diff, std::abs(serial[i]->y - parallel[i]->y));
        }
    }

    std::printf("project_batch   %zu jobs   serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   max|diff| %.17g\n",
                jobs.size(), proj_serial_ms, proj_parallel_ms, proj_serial_ms / proj_parallel_ms,
                max_diff);

    // --- calibration grid ---
    std::uniform_real_distribution<double> px(500.0, 3300.0);
    std::uniform_real_distribution<double> py(500.0, 1700.0);
    std::vector<CalibrationSegment> segments(48);
    for (auto& seg : segments) {
        const double cu = px(rng), cv = py(rng);
        std::uniform_int_distribution<int> f0(1, frames - 80);
        int f = f0(rng);
        for (int k = 0; k < 60; ++k) {
            seg.samples.emplace_back(metadata.at(f + k), PixelPoint{cu, cv});
        }
    }
    const FovSearch search{};

    t0 = Clock::now();
    const auto grid_serial = calibration_grid_serial(segments, cam, search, origin);
    const double cal_serial_ms = ms_since(t0);

    t0 = Clock::now();
    const auto grid_parallel = calibration_grid_parallel(segments, cam, search, origin);
    const double cal_parallel_ms = ms_since(t0);

    max_diff = 0.0;
    for (size_t i = 0; i < grid_serial.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(grid_serial[i] - grid_parallel[i]));
    }

    std::printf("calibration_grid %zu fovs   serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   max|diff| %.17g\n",
                grid_serial.size(), cal_serial_ms, cal_parallel_ms,
                cal_serial_ms / cal_parallel_ms, max_diff);
    return 0;
}
