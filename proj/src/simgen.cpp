#include "seastitch/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"
#include "seastitch/geometry.hpp"

namespace seastitch {
namespace {

void validate(const ScenarioSpec& spec) {
    if (spec.duration < 1) throw InvalidSpec("duration must be >= 1");
    if (spec.fps <= 0.0) throw InvalidSpec("fps must be > 0");
    if (spec.waypoints.empty()) throw InvalidSpec("at least one waypoint required");
    if (spec.gimbal.empty()) throw InvalidSpec("at least one gimbal key required");
    for (const auto& w : spec.waypoints) {
        if (w.altitude <= 0.0) throw InvalidSpec("waypoint altitude must be > 0");
    }
    if (spec.dropout < 0.0 || spec.dropout >= 1.0) throw InvalidSpec("dropout must be in [0, 1)");
    if (spec.noise_px < 0.0) throw InvalidSpec("noise_px must be >= 0");
    if (spec.conf_base <= 0.0 || spec.conf_base > 1.0) throw InvalidSpec("conf_base must be in (0, 1]");
    if (spec.conf_jitter < 0.0) throw InvalidSpec("conf_jitter must be >= 0");
    for (const auto& fw : spec.fragments) {
        if (fw.end < fw.begin) throw InvalidSpec("fragment window end before begin");
    }
    for (std::size_t i = 1; i < spec.waypoints.size(); ++i) {
        if (spec.waypoints[i].frame <= spec.waypoints[i - 1].frame) {
            throw InvalidSpec("waypoint frames must strictly increase");
        }
    }
    for (std::size_t i = 1; i < spec.gimbal.size(); ++i) {
        if (spec.gimbal[i].frame <= spec.gimbal[i - 1].frame) {
            throw InvalidSpec("gimbal key frames must strictly increase");
        }
    }
}

Waypoint drone_at(const std::vector<Waypoint>& wps, int f) {
    if (f <= wps.front().frame) return wps.front();
    if (f >= wps.back().frame) return wps.back();
    for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
        const Waypoint& a = wps[i];
        const Waypoint& b = wps[i + 1];
        if (f < b.frame) {
            const double s = static_cast<double>(f - a.frame) / (b.frame - a.frame);
            Waypoint out;
            out.frame = f;
            out.x = std::lerp(a.x, b.x, s);
            out.y = std::lerp(a.y, b.y, s);
            out.altitude = std::lerp(a.altitude, b.altitude, s);
            return out;
        }
    }
    return wps.back();
}

GimbalKey gimbal_at(const std::vector<GimbalKey>& keys, int f) {
    if (f <= keys.front().frame) return keys.front();
    if (f >= keys.back().frame) return keys.back();
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
        const GimbalKey& a = keys[i];
        const GimbalKey& b = keys[i + 1];
        if (f < b.frame) {
            const double s = static_cast<double>(f - a.frame) / (b.frame - a.frame);
            GimbalKey out;
            out.frame = f;
            out.pitch_deg = std::lerp(a.pitch_deg, b.pitch_deg, s);
            out.heading_deg = circular_lerp_deg(a.heading_deg, b.heading_deg, s);
            return out;
        }
    }
    return keys.back();
}

}  // namespace

double class_footprint(int class_id) {
    switch (class_id) {
        case 0: return 0.6;  // swimmer
        case 1: return 6.0;  // boat
        default: return 1.0;
    }
}

SimOutput generate(const ScenarioSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const int n = spec.duration;
    std::vector<WorldPoint> drone(static_cast<std::size_t>(n) + 1);
    std::vector<FrameMetadata> mds(static_cast<std::size_t>(n) + 1);
    for (int f = 1; f <= n; ++f) {
        const Waypoint w = drone_at(spec.waypoints, f);
        drone[static_cast<std::size_t>(f)] = WorldPoint{w.x, w.y, w.altitude};
    }
    for (int f = 1; f <= n; ++f) {
        const GimbalKey g = gimbal_at(spec.gimbal, f);
        FrameMetadata md;
        md.frame_index = f;
        const auto [lat, lon] =
            local_to_gps(drone[static_cast<std::size_t>(f)].x, drone[static_cast<std::size_t>(f)].y,
                         spec.origin);
        md.gps_latitude = lat;
        md.gps_longitude = lon;
        md.altitude = drone[static_cast<std::size_t>(f)].z;
        md.gimbal_pitch = g.pitch_deg;
        md.gimbal_heading = g.heading_deg;
        const int f2 = std::min(f + 1, n);
        const int f1 = f2 - 1 >= 1 ? f2 - 1 : 1;
        if (f2 > f1) {
            const WorldPoint& a = drone[static_cast<std::size_t>(f1)];
            const WorldPoint& b = drone[static_cast<std::size_t>(f2)];
            md.x_speed = (b.x - a.x) * spec.fps;
            md.y_speed = (b.y - a.y) * spec.fps;
            md.z_speed = (b.z - a.z) * spec.fps;
        }
        mds[static_cast<std::size_t>(f)] = md;
    }

    // Object world paths: piecewise-constant velocity integrated per frame.
    const std::size_t nobj = spec.objects.size();
    std::vector<std::vector<WorldPoint>> pos(nobj,
                                             std::vector<WorldPoint>(static_cast<std::size_t>(n) + 1));
    for (std::size_t oi = 0; oi < nobj; ++oi) {
        const ObjectSpec& obj = spec.objects[oi];
        auto maneuvers = obj.maneuvers;
        std::sort(maneuvers.begin(), maneuvers.end(),
                  [](const VelocityKey& a, const VelocityKey& b) { return a.frame < b.frame; });
        double vx = obj.vx, vy = obj.vy;
        std::size_t next_key = 0;
        WorldPoint p{obj.x, obj.y, 0.0};
        for (int f = 1; f <= n; ++f) {
            while (next_key < maneuvers.size() && maneuvers[next_key].frame <= f) {
                vx = maneuvers[next_key].vx;
                vy = maneuvers[next_key].vy;
                ++next_key;
            }
            pos[oi][static_cast<std::size_t>(f)] = p;
            p.x += vx / spec.fps;
            p.y += vy / spec.fps;
        }
    }

    SimOutput out;
    out.gt.resize(nobj);
    for (std::size_t oi = 0; oi < nobj; ++oi) {
        out.gt[oi].id = static_cast<int>(oi) + 1;
        out.gt[oi].class_id = spec.objects[oi].class_id;
    }

    const auto fragmented = [&](int f, std::size_t oi) {
        for (const auto& fw : spec.fragments) {
            if (f >= fw.begin && f < fw.end &&
                (fw.object < 0 || fw.object == static_cast<int>(oi))) {
                return true;
            }
        }
        return false;
    };

    const double W = spec.camera.width;
    const double H = spec.camera.height;
    for (int f = 1; f <= n; ++f) {
        const FrameMetadata& md = mds[static_cast<std::size_t>(f)];
        for (std::size_t oi = 0; oi < nobj; ++oi) {
            const WorldPoint& p = pos[oi][static_cast<std::size_t>(f)];
            const auto px = forward_project(p, md, spec.camera, spec.origin);
            if (!px) continue;
            const WorldPoint& d = drone[static_cast<std::size_t>(f)];
            const double slant =
                std::sqrt((d.x - p.x) * (d.x - p.x) + (d.y - p.y) * (d.y - p.y) + d.z * d.z);
            const double size =
                std::max(2.0, spec.camera.focal() * class_footprint(spec.objects[oi].class_id) / slant);
            const BBox box{px->u - size / 2.0, px->v - size / 2.0, size, size};
            if (box.x < 0.0 || box.y < 0.0 || box.x + box.w > W || box.y + box.h > H) continue;

            Observation gt_obs;
            gt_obs.frame = f;
            gt_obs.bbox = box;
            gt_obs.confidence = 1.0;
            out.gt[oi].obs.push_back(gt_obs);

            if (fragmented(f, oi)) continue;
            if (spec.dropout > 0.0 && unif(rng) < spec.dropout) continue;
            BBox det = box;
            if (spec.noise_px > 0.0) {
                det.x += spec.noise_px * gauss(rng);
                det.y += spec.noise_px * gauss(rng);
                det.w = std::max(1.0, det.w + 0.5 * spec.noise_px * gauss(rng));
                det.h = std::max(1.0, det.h + 0.5 * spec.noise_px * gauss(rng));
            }
            det.x = std::clamp(det.x, 0.0, W - det.w);
            det.y = std::clamp(det.y, 0.0, H - det.h);
            double conf = spec.conf_base;
            if (spec.conf_jitter > 0.0) {
                conf += (2.0 * unif(rng) - 1.0) * spec.conf_jitter;
            }
            conf = std::clamp(conf, 0.01, 1.0);
            out.detections.push_back({f, det, conf, spec.objects[oi].class_id});
        }
    }
    std::erase_if(out.gt, [](const Tracklet& t) { return t.obs.empty(); });

    std::vector<FrameMetadata> records(mds.begin() + 1, mds.end());
    out.metadata = MetadataSequence(std::move(records));
    return out;
}

namespace {

using ojson = nlohmann::ordered_json;

double num(const ojson& v, const std::string& k) {
    if (!v.is_number()) throw InvalidSpec(k + " must be a number");
    return v.get<double>();
}

int integer(const ojson& v, const std::string& k) {
    if (!v.is_number_integer()) throw InvalidSpec(k + " must be an integer");
    return v.get<int>();
}

}  // namespace

ScenarioSpec read_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    ojson j;
    try {
        j = ojson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidSpec(path + ": " + e.what());
    }
    if (!j.is_object()) throw InvalidSpec("scenario must be a JSON object");

    ScenarioSpec spec;
    for (const auto& [key, v] : j.items()) {
        if (key == "duration") {
            spec.duration = integer(v, key);
        } else if (key == "fps") {
            spec.fps = num(v, key);
        } else if (key == "seed") {
            if (!v.is_number_integer()) throw InvalidSpec("seed must be an integer");
            spec.seed = v.get<std::uint64_t>();
        } else if (key == "dropout") {
            spec.dropout = num(v, key);
        } else if (key == "noise_px") {
            spec.noise_px = num(v, key);
        } else if (key == "conf_base") {
            spec.conf_base = num(v, key);
        } else if (key == "conf_jitter") {
            spec.conf_jitter = num(v, key);
        } else if (key == "camera") {
            for (const auto& [ck, cv] : v.items()) {
                if (ck == "fov") {
                    spec.camera.fov_deg = num(cv, "camera.fov");
                } else if (ck == "width") {
                    spec.camera.width = integer(cv, "camera.width");
                } else if (ck == "height") {
                    spec.camera.height = integer(cv, "camera.height");
                } else {
                    throw InvalidSpec("unknown camera key '" + ck + "'");
                }
            }
        } else if (key == "origin") {
            for (const auto& [ok, ov] : v.items()) {
                if (ok == "latitude") {
                    spec.origin.latitude = num(ov, "origin.latitude");
                } else if (ok == "longitude") {
                    spec.origin.longitude = num(ov, "origin.longitude");
                } else {
                    throw InvalidSpec("unknown origin key '" + ok + "'");
                }
            }
        } else if (key == "waypoints") {
            if (!v.is_array()) throw InvalidSpec("waypoints must be an array");
            for (const auto& w : v) {
                Waypoint wp;
                for (const auto& [wk, wv] : w.items()) {
                    if (wk == "frame") {
                        wp.frame = integer(wv, "waypoint.frame");
                    } else if (wk == "x") {
                        wp.x = num(wv, "waypoint.x");
                    } else if (wk == "y") {
                        wp.y = num(wv, "waypoint.y");
                    } else if (wk == "altitude") {
                        wp.altitude = num(wv, "waypoint.altitude");
                    } else {
                        throw InvalidSpec("unknown waypoint key '" + wk + "'");
                    }
                }
                spec.waypoints.push_back(wp);
            }
        } else if (key == "gimbal") {
            if (!v.is_array()) throw InvalidSpec("gimbal must be an array");
            for (const auto& g : v) {
                GimbalKey gk;
                for (const auto& [kk, kv] : g.items()) {
                    if (kk == "frame") {
                        gk.frame = integer(kv, "gimbal.frame");
                    } else if (kk == "pitch") {
                        gk.pitch_deg = num(kv, "gimbal.pitch");
                    } else if (kk == "heading") {
                        gk.heading_deg = num(kv, "gimbal.heading");
                    } else {
                        throw InvalidSpec("unknown gimbal key '" + kk + "'");
                    }
                }
                spec.gimbal.push_back(gk);
            }
        } else if (key == "objects") {
            if (!v.is_array()) throw InvalidSpec("objects must be an array");
            for (const auto& o : v) {
                ObjectSpec obj;
                for (const auto& [ok, ov] : o.items()) {
                    if (ok == "class") {
                        obj.class_id = integer(ov, "object.class");
                    } else if (ok == "x") {
                        obj.x = num(ov, "object.x");
                    } else if (ok == "y") {
                        obj.y = num(ov, "object.y");
                    } else if (ok == "vx") {
                        obj.vx = num(ov, "object.vx");
                    } else if (ok == "vy") {
                        obj.vy = num(ov, "object.vy");
                    } else if (ok == "maneuvers") {
                        if (!ov.is_array()) throw InvalidSpec("object.maneuvers must be an array");
                        for (const auto& m : ov) {
                            VelocityKey vk;
                            for (const auto& [mk, mv] : m.items()) {
                                if (mk == "frame") {
                                    vk.frame = integer(mv, "maneuver.frame");
                                } else if (mk == "vx") {
                                    vk.vx = num(mv, "maneuver.vx");
                                } else if (mk == "vy") {
                                    vk.vy = num(mv, "maneuver.vy");
                                } else {
                                    throw InvalidSpec("unknown maneuver key '" + mk + "'");
                                }
                            }
                            obj.maneuvers.push_back(vk);
                        }
                    } else {
                        throw InvalidSpec("unknown object key '" + ok + "'");
                    }
                }
                spec.objects.push_back(obj);
            }
        } else if (key == "fragments") {
            if (!v.is_array()) throw InvalidSpec("fragments must be an array");
            for (const auto& fw : v) {
                FragmentWindow w;
                for (const auto& [fk, fv] : fw.items()) {
                    if (fk == "begin") {
                        w.begin = integer(fv, "fragment.begin");
                    } else if (fk == "end") {
                        w.end = integer(fv, "fragment.end");
                    } else if (fk == "object") {
                        w.object = integer(fv, "fragment.object");
                    } else {
                        throw InvalidSpec("unknown fragment key '" + fk + "'");
                    }
                }
                spec.fragments.push_back(w);
            }
        } else {
            throw InvalidSpec("unknown scenario key '" + key + "'");
        }
    }
    return spec;
}

}  // namespace seastitch
