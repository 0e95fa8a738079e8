// Command-line front end: stitch, pretrack, simulate, evaluate,
// calibrate-fov, project. Exit codes: 0 success, 2 missing input file,
// nonzero otherwise with a one-line cause on stderr.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seastitch/geometry.hpp"
#include "seastitch/io.hpp"
#include "seastitch/metrics.hpp"
#include "seastitch/pipeline.hpp"
#include "seastitch/pretrack.hpp"
#include "seastitch/simgen.hpp"

namespace fs = std::filesystem;
using namespace seastitch;

namespace {

class MissingInput : public std::runtime_error {
  public:
    explicit MissingInput(const std::string& path) : std::runtime_error("missing file: " + path) {}
};

void ensure_exists(const std::string& path) {
    if (!fs::is_regular_file(path)) throw MissingInput(path);
}

PipelineConfig load_config(const std::string& path) {
    if (path.empty()) return PipelineConfig{};
    ensure_exists(path);
    return read_config(path);
}

void emit_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

struct StitchArgs {
    std::string detections, tracks, metadata, config, out{"."};
    bool no_short_term{false}, no_long_term{false}, no_interp{false};
    int jobs{0};
};

int cmd_stitch(const StitchArgs& a) {
    if (a.detections.empty() == a.tracks.empty()) {
        std::cerr << "error: provide exactly one of --detections or --tracks\n";
        return 1;
    }
    const PipelineConfig cfg = load_config(a.config);
    ensure_exists(a.metadata);
    if (!a.detections.empty()) ensure_exists(a.detections);
    if (!a.tracks.empty()) ensure_exists(a.tracks);

    const MetadataSequence metadata =
        read_metadata(a.metadata, cfg.metadata_interpolation, cfg.metadata_frame_offset);
    PipelineOptions opts;
    opts.short_term = !a.no_short_term;
    opts.long_term = !a.no_long_term;
    opts.interpolate = !a.no_interp;
    opts.jobs = a.jobs;

    std::vector<std::string> warnings;
    PipelineResult result;
    if (!a.detections.empty()) {
        result = run_pipeline(read_detections(a.detections, &warnings), metadata, cfg, opts);
    } else {
        result = run_pipeline(std::move(read_mot(a.tracks, &warnings).tracklets), metadata, cfg,
                              opts);
    }
    emit_warnings(warnings);

    fs::create_directories(a.out);
    write_tracklets((fs::path(a.out) / "tracks.csv").string(), result.tracklets);
    write_text(fs::path(a.out) / "report.json", report_to_json(result));
    return 0;
}

struct PretrackArgs {
    std::string detections, config, out{"."};
};

int cmd_pretrack(const PretrackArgs& a) {
    const PipelineConfig cfg = load_config(a.config);
    ensure_exists(a.detections);
    std::vector<std::string> warnings;
    const auto detections = read_detections(a.detections, &warnings);
    emit_warnings(warnings);
    const auto tracklets = two_stage_track(detections, cfg.pretrack);
    fs::create_directories(a.out);
    write_tracklets((fs::path(a.out) / "tracks.csv").string(), tracklets);
    return 0;
}

struct SimulateArgs {
    std::string config, out{"."};
    std::uint64_t seed{0};
    bool seed_set{false};
};

int cmd_simulate(const SimulateArgs& a) {
    ensure_exists(a.config);
    ScenarioSpec spec = read_scenario(a.config);
    if (a.seed_set) spec.seed = a.seed;
    const SimOutput sim = generate(spec);
    fs::create_directories(a.out);
    write_tracklets((fs::path(a.out) / "gt.csv").string(), sim.gt);
    write_detections((fs::path(a.out) / "detections.csv").string(), sim.detections);
    write_metadata((fs::path(a.out) / "metadata.json").string(), sim.metadata);
    return 0;
}

struct EvaluateArgs {
    std::string gt, pred;
};

int cmd_evaluate(const EvaluateArgs& a) {
    ensure_exists(a.gt);
    ensure_exists(a.pred);
    std::vector<std::string> warnings;
    const auto gt = read_mot(a.gt, &warnings);
    const auto pred = read_mot(a.pred, &warnings);
    emit_warnings(warnings);
    const EvalResult r = evaluate(gt.tracklets, pred.tracklets);
    std::cout << to_kv(r);
    return 0;
}

struct CalibrateArgs {
    std::string tracks, metadata, config;
};

int cmd_calibrate_fov(const CalibrateArgs& a) {
    const PipelineConfig cfg = load_config(a.config);
    ensure_exists(a.tracks);
    ensure_exists(a.metadata);
    std::vector<std::string> warnings;
    const auto mot = read_mot(a.tracks, &warnings);
    emit_warnings(warnings);
    const MetadataSequence metadata =
        read_metadata(a.metadata, cfg.metadata_interpolation, cfg.metadata_frame_offset);

    std::vector<CalibrationSegment> segments;
    for (const Tracklet& t : mot.tracklets) {
        CalibrationSegment seg;
        for (const Observation& o : t.obs) {
            const FrameMetadata* md = metadata.find(o.frame);
            if (md == nullptr) throw MetadataGapError(o.frame);
            seg.samples.emplace_back(*md, PixelPoint{o.bbox.cx(), o.bbox.cy()});
        }
        if (seg.samples.size() >= 2) segments.push_back(std::move(seg));
    }
    const double fov = calibrate_fov(segments, cfg.camera, FovSearch{}, cfg.origin);
    std::printf("fov_deg=%.6f\n", fov);
    return 0;
}

struct ProjectArgs {
    std::string metadata, config;
    int frame{1};
    double u{0.0};
    double v{0.0};
};

int cmd_project(const ProjectArgs& a) {
    const PipelineConfig cfg = load_config(a.config);
    ensure_exists(a.metadata);
    const MetadataSequence metadata =
        read_metadata(a.metadata, cfg.metadata_interpolation, cfg.metadata_frame_offset);
    const FrameMetadata* md = metadata.find(a.frame);
    if (md == nullptr) throw MetadataGapError(a.frame);
    const auto world = project_detection(*md, a.u, a.v, cfg.camera, cfg.origin);
    if (!world) {
        std::cerr << "error: pixel ray does not hit the sea plane\n";
        return 1;
    }
    std::printf("x=%.6f y=%.6f z=0.000000\n", world->x, world->y);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tracklet stitching for drone-based maritime tracking"};
    app.require_subcommand(1);

    StitchArgs stitch_args;
    auto* stitch_cmd = app.add_subcommand("stitch", "Run the full stitching pipeline");
    stitch_cmd->add_option("--detections", stitch_args.detections, "Raw detections (MOT CSV)");
    stitch_cmd->add_option("--tracks", stitch_args.tracks, "Pre-built tracklets (MOT CSV)");
    stitch_cmd->add_option("--metadata", stitch_args.metadata, "Per-frame drone metadata (JSON)")
        ->required();
    stitch_cmd->add_option("--config", stitch_args.config, "Config overrides (JSON)");
    stitch_cmd->add_option("--out", stitch_args.out, "Output directory");
    stitch_cmd->add_flag("--no-short-term", stitch_args.no_short_term,
                         "Disable the short-term pass");
    stitch_cmd->add_flag("--no-long-term", stitch_args.no_long_term, "Disable the long-term pass");
    stitch_cmd->add_flag("--no-interp", stitch_args.no_interp, "Disable gap interpolation");
    stitch_cmd->add_option("--jobs", stitch_args.jobs, "Projection threads (0 = auto)")
        ->check(CLI::NonNegativeNumber);

    PretrackArgs pretrack_args;
    auto* pretrack_cmd = app.add_subcommand("pretrack", "Detections to tracklets only");
    pretrack_cmd->add_option("--detections", pretrack_args.detections, "Raw detections (MOT CSV)")
        ->required();
    pretrack_cmd->add_option("--config", pretrack_args.config, "Config overrides (JSON)");
    pretrack_cmd->add_option("--out", pretrack_args.out, "Output directory");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Render a synthetic scenario");
    sim_cmd->add_option("--config", sim_args.config, "Scenario description (JSON)")->required();
    auto* seed_opt = sim_cmd->add_option("--seed", sim_args.seed, "Override the scenario seed");
    sim_cmd->add_option("--out", sim_args.out, "Output directory");

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score predicted tracks against ground truth");
    eval_cmd->add_option("gt", eval_args.gt, "Ground-truth tracks (MOT CSV)")->required();
    eval_cmd->add_option("pred", eval_args.pred, "Predicted tracks (MOT CSV)")->required();

    CalibrateArgs cal_args;
    auto* cal_cmd = app.add_subcommand("calibrate-fov", "Estimate the camera field of view");
    cal_cmd->add_option("--tracks", cal_args.tracks, "Tracks of static objects (MOT CSV)")
        ->required();
    cal_cmd->add_option("--metadata", cal_args.metadata, "Per-frame drone metadata (JSON)")
        ->required();
    cal_cmd->add_option("--config", cal_args.config, "Config overrides (JSON)");

    ProjectArgs proj_args;
    auto* proj_cmd = app.add_subcommand("project", "Project one pixel to the sea plane");
    proj_cmd->add_option("frame", proj_args.frame, "Frame number")->required();
    proj_cmd->add_option("u", proj_args.u, "Pixel x")->required();
    proj_cmd->add_option("v", proj_args.v, "Pixel y")->required();
    proj_cmd->add_option("--metadata", proj_args.metadata, "Per-frame drone metadata (JSON)")
        ->required();
    proj_cmd->add_option("--config", proj_args.config, "Config overrides (JSON)");

    CLI11_PARSE(app, argc, argv);
    sim_args.seed_set = seed_opt->count() > 0;

    try {
        if (*stitch_cmd) return cmd_stitch(stitch_args);
        if (*pretrack_cmd) return cmd_pretrack(pretrack_args);
        if (*sim_cmd) return cmd_simulate(sim_args);
        if (*eval_cmd) return cmd_evaluate(eval_args);
        if (*cal_cmd) return cmd_calibrate_fov(cal_args);
        if (*proj_cmd) return cmd_project(proj_args);
    } catch (const MissingInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
