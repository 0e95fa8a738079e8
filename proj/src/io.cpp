#include "seastitch/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace seastitch {
namespace {

using ojson = nlohmann::ordered_json;

std::string fmt_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& field, int line_no) {
    const std::string t = trim(field);
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || t.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + field + "'");
    }
    return v;
}

long parse_int(const std::string& field, int line_no) {
    const std::string t = trim(field);
    long v = 0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || t.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + field + "'");
    }
    return v;
}

struct MotRow {
    int line_no;
    int frame;
    int id;
    BBox bbox;
    double conf;
    int class_id;
    double visibility;
};

std::vector<MotRow> read_mot_rows(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<MotRow> rows;
    std::string line;
    int line_no = 0;
    int prev_frame = 0;
    bool warned_order = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                             std::to_string(fields.size()));
        }
        MotRow r;
        r.line_no = line_no;
        r.frame = static_cast<int>(parse_int(fields[0], line_no));
        r.id = static_cast<int>(parse_int(fields[1], line_no));
        r.bbox = BBox{parse_double(fields[2], line_no), parse_double(fields[3], line_no),
                      parse_double(fields[4], line_no), parse_double(fields[5], line_no)};
        r.conf = parse_double(fields[6], line_no);
        r.class_id = static_cast<int>(parse_int(fields[7], line_no));
        r.visibility = parse_double(fields[8], line_no);
        if (r.frame < 1) {
            throw ParseError("line " + std::to_string(line_no) + ": frame must be >= 1");
        }
        if (r.id < 1 && r.id != -1) {
            throw ParseError("line " + std::to_string(line_no) + ": id must be >= 1 or -1");
        }
        if (r.bbox.w <= 0.0 || r.bbox.h <= 0.0) {
            throw ParseError("line " + std::to_string(line_no) + ": box width/height must be > 0");
        }
        if (!rows.empty() && r.frame < prev_frame && !warned_order) {
            warned_order = true;
            if (warnings) {
                warnings->push_back("NonMonotonicFrames: line " + std::to_string(line_no) +
                                    " goes back to frame " + std::to_string(r.frame));
            }
        }
        prev_frame = r.frame;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

MotData read_mot(const std::string& path, std::vector<std::string>* warnings) {
    MotData out;
    std::map<int, Tracklet> by_id;
    std::map<int, int> class_line;  // id -> line that fixed the class
    for (const MotRow& r : read_mot_rows(path, warnings)) {
        if (r.id == -1) {
            out.detections.push_back({r.frame, r.bbox, r.conf, r.class_id});
            continue;
        }
        auto [it, inserted] = by_id.try_emplace(r.id);
        Tracklet& t = it->second;
        if (inserted) {
            t.id = r.id;
            t.class_id = r.class_id;
            class_line[r.id] = r.line_no;
        } else if (t.class_id != r.class_id) {
            throw ParseError("line " + std::to_string(r.line_no) + ": class " +
                             std::to_string(r.class_id) + " for id " + std::to_string(r.id) +
                             " conflicts with line " + std::to_string(class_line[r.id]));
        }
        Observation o;
        o.frame = r.frame;
        o.bbox = r.bbox;
        o.confidence = r.conf;
        o.interpolated = r.visibility == 0.0;
        t.obs.push_back(o);
    }
    for (auto& [id, t] : by_id) {
        std::sort(t.obs.begin(), t.obs.end(),
                  [](const Observation& a, const Observation& b) { return a.frame < b.frame; });
        for (std::size_t i = 1; i < t.obs.size(); ++i) {
            if (t.obs[i].frame == t.obs[i - 1].frame) {
                throw ParseError("duplicate frame " + std::to_string(t.obs[i].frame) + " for id " +
                                 std::to_string(id));
            }
        }
        out.tracklets.push_back(std::move(t));
    }
    return out;
}

std::vector<Detection> read_detections(const std::string& path, std::vector<std::string>* warnings) {
    std::vector<Detection> out;
    for (const MotRow& r : read_mot_rows(path, warnings)) {
        out.push_back({r.frame, r.bbox, r.conf, r.class_id});
    }
    return out;
}

void write_tracklets(const std::string& path, const std::vector<Tracklet>& tracklets,
                     bool debug_flags) {
    struct Line {
        int frame;
        int id;
        const Observation* obs;
        int class_id;
    };
    std::vector<Line> lines;
    for (const auto& t : tracklets) {
        for (const auto& o : t.obs) lines.push_back({o.frame, t.id, &o, t.class_id});
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
    });
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    for (const Line& l : lines) {
        const int vis = debug_flags && l.obs->interpolated ? 0 : 1;
        out << l.frame << ',' << l.id << ',' << fmt_g6(l.obs->bbox.x) << ',' << fmt_g6(l.obs->bbox.y)
            << ',' << fmt_g6(l.obs->bbox.w) << ',' << fmt_g6(l.obs->bbox.h) << ','
            << fmt_g6(l.obs->confidence) << ',' << l.class_id << ',' << vis << '\n';
    }
}

void write_detections(const std::string& path, const std::vector<Detection>& detections) {
    std::vector<const Detection*> rows;
    rows.reserve(detections.size());
    for (const auto& d : detections) rows.push_back(&d);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Detection* a, const Detection* b) { return a->frame < b->frame; });
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    for (const Detection* d : rows) {
        out << d->frame << ",-1," << fmt_g6(d->bbox.x) << ',' << fmt_g6(d->bbox.y) << ','
            << fmt_g6(d->bbox.w) << ',' << fmt_g6(d->bbox.h) << ',' << fmt_g6(d->confidence) << ','
            << d->class_id << ",1\n";
    }
}

MetadataSequence read_metadata(const std::string& path, bool interpolate, int frame_offset) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    ojson j;
    try {
        j = ojson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!j.is_array()) throw TypeError(path + ": metadata must be a JSON array");

    static const char* kFields[] = {"gps_latitude", "gps_longitude", "altitude",
                                    "gimbal_pitch", "gimbal_heading", "x_speed",
                                    "y_speed",      "z_speed"};
    std::vector<FrameMetadata> records;
    records.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& rec = j[i];
        const std::string where = "record " + std::to_string(i);
        if (!rec.is_object()) throw TypeError(where + ": expected an object");
        if (!rec.contains("frame_index")) throw MissingField(where + ": frame_index");
        if (!rec["frame_index"].is_number_integer()) {
            throw TypeError(where + ": frame_index must be an integer");
        }
        FrameMetadata md;
        md.frame_index = rec["frame_index"].get<int>();
        const std::string frame_tag = "frame " + std::to_string(md.frame_index);
        double values[8];
        for (int k = 0; k < 8; ++k) {
            if (!rec.contains(kFields[k])) {
                throw MissingField(std::string(kFields[k]) + " missing at " + frame_tag);
            }
            if (!rec[kFields[k]].is_number()) {
                throw TypeError(std::string(kFields[k]) + " must be a number at " + frame_tag);
            }
            values[k] = rec[kFields[k]].get<double>();
        }
        md.gps_latitude = values[0];
        md.gps_longitude = values[1];
        md.altitude = values[2];
        md.gimbal_pitch = values[3];
        md.gimbal_heading = std::fmod(values[4], 360.0);
        if (md.gimbal_heading < 0.0) md.gimbal_heading += 360.0;
        md.x_speed = values[5];
        md.y_speed = values[6];
        md.z_speed = values[7];
        if (md.altitude <= 0.0) {
            throw RangeError("altitude must be > 0 at " + frame_tag);
        }
        md.frame_index += frame_offset;
        records.push_back(md);
    }
    std::sort(records.begin(), records.end(),
              [](const FrameMetadata& a, const FrameMetadata& b) {
                  return a.frame_index < b.frame_index;
              });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].frame_index == records[i - 1].frame_index) {
            throw ParseError("duplicate frame_index " + std::to_string(records[i].frame_index));
        }
    }
    if (interpolate && records.size() > 1) {
        std::vector<FrameMetadata> filled;
        filled.reserve(records.size());
        for (std::size_t i = 0; i + 1 < records.size(); ++i) {
            const FrameMetadata& a = records[i];
            const FrameMetadata& b = records[i + 1];
            filled.push_back(a);
            for (int f = a.frame_index + 1; f < b.frame_index; ++f) {
                const double s =
                    static_cast<double>(f - a.frame_index) / (b.frame_index - a.frame_index);
                FrameMetadata m;
                m.frame_index = f;
                m.gps_latitude = std::lerp(a.gps_latitude, b.gps_latitude, s);
                m.gps_longitude = std::lerp(a.gps_longitude, b.gps_longitude, s);
                m.altitude = std::lerp(a.altitude, b.altitude, s);
                m.gimbal_pitch = std::lerp(a.gimbal_pitch, b.gimbal_pitch, s);
                m.gimbal_heading = circular_lerp_deg(a.gimbal_heading, b.gimbal_heading, s);
                m.x_speed = std::lerp(a.x_speed, b.x_speed, s);
                m.y_speed = std::lerp(a.y_speed, b.y_speed, s);
                m.z_speed = std::lerp(a.z_speed, b.z_speed, s);
                filled.push_back(m);
            }
        }
        filled.push_back(records.back());
        records = std::move(filled);
    }
    return MetadataSequence(std::move(records));
}

void write_metadata(const std::string& path, const MetadataSequence& metadata) {
    ojson arr = ojson::array();
    for (const FrameMetadata& md : metadata.records()) {
        ojson rec;
        rec["frame_index"] = md.frame_index;
        rec["gps_latitude"] = md.gps_latitude;
        rec["gps_longitude"] = md.gps_longitude;
        rec["altitude"] = md.altitude;
        rec["gimbal_pitch"] = md.gimbal_pitch;
        rec["gimbal_heading"] = md.gimbal_heading;
        rec["x_speed"] = md.x_speed;
        rec["y_speed"] = md.y_speed;
        rec["z_speed"] = md.z_speed;
        arr.push_back(std::move(rec));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << arr.dump(2) << '\n';
}

namespace {

int class_key_to_id(const std::string& key) {
    if (key == "swimmer") return 0;
    if (key == "boat") return 1;
    if (!key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
            return std::isdigit(c);
        })) {
        return std::stoi(key);
    }
    throw UnknownKey("unknown class key '" + key + "'");
}

void apply_class_map(const ojson& v, const std::string& name, std::map<int, double>& by_class,
                     double& fallback) {
    if (v.is_number()) {
        const double value = v.get<double>();
        if (value <= 0.0) throw RangeError(name + " must be > 0");
        fallback = value;
        by_class.clear();
        return;
    }
    if (!v.is_object()) throw TypeError(name + " must be a number or an object");
    for (const auto& [key, val] : v.items()) {
        if (!val.is_number()) throw TypeError(name + "." + key + " must be a number");
        const double value = val.get<double>();
        if (value <= 0.0) throw RangeError(name + "." + key + " must be > 0");
        if (key == "default") {
            fallback = value;
        } else {
            by_class[class_key_to_id(key)] = value;
        }
    }
}

}  // namespace

void sync_derived_config(PipelineConfig& cfg) {
    cfg.reid.image_width = cfg.camera.width;
    cfg.reid.image_height = cfg.camera.height;
}

PipelineConfig read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = trim(buffer.str());

    PipelineConfig cfg;
    if (text.empty()) {
        sync_derived_config(cfg);
        return cfg;
    }
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!j.is_object()) throw TypeError(path + ": config must be a JSON object");

    const auto number = [](const ojson& v, const std::string& k) -> double {
        if (!v.is_number()) throw TypeError(k + " must be a number");
        return v.get<double>();
    };
    const auto integer = [](const ojson& v, const std::string& k) -> int {
        if (!v.is_number_integer()) throw TypeError(k + " must be an integer");
        return v.get<int>();
    };
    const auto boolean = [](const ojson& v, const std::string& k) -> bool {
        if (!v.is_boolean()) throw TypeError(k + " must be a boolean");
        return v.get<bool>();
    };

    for (const auto& [key, v] : j.items()) {
        if (key == "fov") {
            const double fov = number(v, key);
            if (fov <= 0.0 || fov >= 180.0) throw RangeError("fov must be in (0, 180)");
            cfg.camera.fov_deg = fov;
        } else if (key == "width") {
            const int w = integer(v, key);
            if (w <= 0) throw RangeError("width must be > 0");
            cfg.camera.width = w;
        } else if (key == "height") {
            const int h = integer(v, key);
            if (h <= 0) throw RangeError("height must be > 0");
            cfg.camera.height = h;
        } else if (key == "origin_latitude") {
            const double lat = number(v, key);
            if (std::abs(lat) >= 90.0) throw RangeError("origin_latitude must satisfy |lat| < 90");
            cfg.origin.latitude = lat;
        } else if (key == "origin_longitude") {
            cfg.origin.longitude = number(v, key);
        } else if (key == "high_conf") {
            cfg.pretrack.high_conf = number(v, key);
        } else if (key == "low_conf") {
            cfg.pretrack.low_conf = number(v, key);
        } else if (key == "init_conf") {
            cfg.pretrack.init_conf = number(v, key);
        } else if (key == "buffer_frames") {
            const int b = integer(v, key);
            if (b < 0) throw RangeError("buffer_frames must be >= 0");
            cfg.pretrack.buffer_frames = b;
        } else if (key == "iou_gate") {
            const double g = number(v, key);
            if (g <= 0.0 || g >= 1.0) throw RangeError("iou_gate must be in (0, 1)");
            cfg.pretrack.iou_gate = g;
        } else if (key == "max_gap") {
            const int g = integer(v, key);
            if (g < 0) throw RangeError("max_gap must be >= 0");
            cfg.post.max_gap = g;
        } else if (key == "nms_iou") {
            const double g = number(v, key);
            if (g <= 0.0 || g > 1.0) throw RangeError("nms_iou must be in (0, 1]");
            cfg.post.nms_iou = g;
        } else if (key == "pre_reid") {
            cfg.post.pre_reid = boolean(v, key);
        } else if (key == "post_reid") {
            cfg.post.post_reid = boolean(v, key);
        } else if (key == "tau_match") {
            apply_class_map(v, key, cfg.reid.tau_match_by_class, cfg.reid.tau_match_default);
        } else if (key == "tau_memory") {
            apply_class_map(v, key, cfg.reid.tau_memory_by_class, cfg.reid.tau_memory_default);
        } else if (key == "lambda") {
            const double l = number(v, key);
            if (l <= 0.0) throw RangeError("lambda must be > 0");
            cfg.reid.lambda = l;
        } else if (key == "velocity_window") {
            const int w = integer(v, key);
            if (w < 1) throw RangeError("velocity_window must be >= 1");
            cfg.reid.velocity_window = w;
        } else if (key == "border_margin") {
            const double m = number(v, key);
            if (m < 0.0) throw RangeError("border_margin must be >= 0");
            cfg.reid.border_margin = m;
        } else if (key == "metadata_frame_offset") {
            cfg.metadata_frame_offset = integer(v, key);
        } else if (key == "metadata_interpolation") {
            cfg.metadata_interpolation = boolean(v, key);
        } else {
            throw UnknownKey("unknown config key '" + key + "'");
        }
    }
    if (!(cfg.pretrack.low_conf <= cfg.pretrack.init_conf &&
          cfg.pretrack.init_conf <= cfg.pretrack.high_conf)) {
        throw RangeError("confidence thresholds must satisfy low_conf <= init_conf <= high_conf");
    }
    sync_derived_config(cfg);
    return cfg;
}

}  // namespace seastitch
