// File formats: MOT-style track/detection text files, JSON metadata, and the
// pipeline configuration file.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "seastitch/postprocess.hpp"
#include "seastitch/pretrack.hpp"
#include "seastitch/reid.hpp"
#include "seastitch/types.hpp"

namespace seastitch {

class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class MissingField : public std::runtime_error {
  public:
    explicit MissingField(const std::string& what) : std::runtime_error(what) {}
};

class RangeError : public std::runtime_error {
  public:
    explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

class UnknownKey : public std::runtime_error {
  public:
    explicit UnknownKey(const std::string& what) : std::runtime_error(what) {}
};

class TypeError : public std::runtime_error {
  public:
    explicit TypeError(const std::string& what) : std::runtime_error(what) {}
};

/// Rows with id >= 1 grouped into tracklets; id == -1 rows are unassociated
/// detections.
struct MotData {
    std::vector<Tracklet> tracklets;
    std::vector<Detection> detections;
};

/// MOT text format: `frame,id,bb_left,bb_top,bb_width,bb_height,conf,class,
/// visibility`, frame and id 1-based. Throws ParseError (with line number) on
/// malformed rows, including w <= 0 or h <= 0. A NonMonotonicFrames warning is
/// appended when row frames decrease.
MotData read_mot(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// Every row as a detection, whatever its id column says.
std::vector<Detection> read_detections(const std::string& path,
                                       std::vector<std::string>* warnings = nullptr);

/// Rows sorted by (frame, id); floats use 6 significant digits. With
/// debug_flags the visibility column is 0 for interpolated boxes (1
/// otherwise); the plain format always writes 1.
void write_tracklets(const std::string& path, const std::vector<Tracklet>& tracklets,
                     bool debug_flags = false);

/// Rows with id -1, sorted by frame.
void write_detections(const std::string& path, const std::vector<Detection>& detections);

/// JSON array of per-frame records carrying frame_index plus the eight
/// metadata fields (gps, altitude, gimbal angles, speeds). Gimbal heading is
/// normalized into [0, 360). Optional linear interpolation fills missing
/// frames (heading on the circle); frame_offset shifts every frame_index.
/// Throws ParseError / MissingField / TypeError / RangeError.
MetadataSequence read_metadata(const std::string& path, bool interpolate = false,
                               int frame_offset = 0);

void write_metadata(const std::string& path, const MetadataSequence& metadata);

struct PipelineConfig {
    CameraIntrinsics camera{};
    ReferenceOrigin origin{};
    ReidConfig reid{};
    PretrackConfig pretrack{};
    PostConfig post{};
    int metadata_frame_offset{0};
    bool metadata_interpolation{false};
};

/// JSON object of overrides; an empty or whitespace-only file keeps every
/// documented default. Unknown keys raise UnknownKey, wrong JSON types raise
/// TypeError, out-of-range values raise RangeError. tau_match / tau_memory
/// accept either a number (uniform) or an object keyed by class name
/// ("swimmer", "boat"), numeric class id, or "default".
PipelineConfig read_config(const std::string& path);

/// Image dimensions of the reid config follow the camera; called by
/// read_config and after any manual camera override.
void sync_derived_config(PipelineConfig& cfg);

}  // namespace seastitch
