#include "properties.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "seastitch/assignment.hpp"
#include "seastitch/geometry.hpp"
#include "seastitch/io.hpp"
#include "seastitch/kernels.hpp"
#include "seastitch/metrics.hpp"
#include "seastitch/postprocess.hpp"
#include "seastitch/pretrack.hpp"
#include "seastitch/reid.hpp"
#include "seastitch/simgen.hpp"
#include "test_support.hpp"

#ifndef SEASTITCH_CLI_PATH
#define SEASTITCH_CLI_PATH ""
#endif

namespace props {

using namespace seastitch;
using testsup::centered_box;
using testsup::chance;
using testsup::hover_metadata;
using testsup::make_pose;
using testsup::make_track;
using testsup::Rng;
using testsup::uniform;
using testsup::uniform_int;

const char* cli_path() { return SEASTITCH_CLI_PATH; }

namespace {

PropResult fail(const std::string& note) { return PropResult{false, note}; }
PropResult pass() { return PropResult{}; }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string obs_key(int frame, const BBox& b, double conf, int class_id) {
    return std::to_string(frame) + "," + fmt(b.x) + "," + fmt(b.y) + "," + fmt(b.w) + "," +
           fmt(b.h) + "," + fmt(conf) + "," + std::to_string(class_id);
}

std::vector<std::string> obs_multiset(const std::vector<Tracklet>& ts) {
    std::vector<std::string> keys;
    for (const Tracklet& t : ts) {
        for (const Observation& o : t.obs) {
            keys.push_back(obs_key(o.frame, o.bbox, o.confidence, t.class_id));
        }
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::string track_fingerprint(const Tracklet& t, bool with_id = true) {
    std::string s = with_id ? std::to_string(t.id) + "#" : std::string();
    s += std::to_string(t.class_id) + ":";
    for (const Observation& o : t.obs) {
        s += obs_key(o.frame, o.bbox, o.confidence, t.class_id);
        s += o.interpolated ? "*;" : ";";
    }
    return s;
}

std::string set_fingerprint(const std::vector<Tracklet>& ts, bool with_id = true) {
    std::vector<std::string> parts;
    parts.reserve(ts.size());
    for (const Tracklet& t : ts) parts.push_back(track_fingerprint(t, with_id));
    if (!with_id) std::sort(parts.begin(), parts.end());
    std::string all;
    for (const auto& p : parts) {
        all += p;
        all += "\n";
    }
    return all;
}

// ---------------------------------------------------------------------------
// geometry

struct RandomShot {
    CameraIntrinsics cam;
    FrameMetadata md;
    double u{0.0};
    double v{0.0};
};

RandomShot random_shot(Rng& rng) {
    RandomShot s;
    s.cam.fov_deg = uniform(rng, 40.0, 110.0);
    s.md = make_pose(1, uniform(rng, -500.0, 500.0), uniform(rng, -500.0, 500.0),
                     uniform(rng, 10.0, 120.0), uniform(rng, 15.0, 90.0), uniform(rng, 0.0, 360.0));
    s.u = uniform(rng, 0.0, static_cast<double>(s.cam.width));
    s.v = uniform(rng, 0.0, static_cast<double>(s.cam.height));
    return s;
}

PropResult geometry_intersect_on_plane_and_ray(std::uint64_t seed, int cases) {
    Rng rng(seed);
    int done = 0;
    for (int attempt = 0; attempt < cases * 50 && done < cases; ++attempt) {
        const RandomShot s = random_shot(rng);
        const Eigen::Matrix3d K = intrinsics_matrix(s.cam);
        const Eigen::Matrix3d R = rotation_from_gimbal(s.md.gimbal_heading, s.md.gimbal_pitch);
        const Eigen::Vector3d ray = pixel_ray(K, R, s.u, s.v);
        const WorldPoint dp = drone_position(s.md, {});
        const auto hit = ground_intersect(dp, ray);
        if (!hit) continue;
        ++done;
        if (std::abs(hit->z) >= 1e-12) return fail("intersection off plane: z=" + fmt(hit->z));
        Eigen::Vector3d d(hit->x - dp.x, hit->y - dp.y, hit->z - dp.z);
        if (d.dot(ray) <= 0.0) return fail("intersection behind the camera");
        const double off_ray = d.normalized().cross(ray).norm();
        if (off_ray >= 1e-9) return fail("intersection off ray: " + fmt(off_ray));
    }
    if (done < cases) return fail("only " + std::to_string(done) + " intersecting samples");
    return pass();
}

PropResult geometry_rotation_orthonormal(std::uint64_t, int) {
    for (int h = 0; h < 360; ++h) {
        for (int p = -90; p <= 90; ++p) {
            const Eigen::Matrix3d R = rotation_from_gimbal(h, p);
            const double ortho = (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
            if (ortho >= 1e-9) {
                return fail("R^T R != I at heading " + std::to_string(h) + " pitch " +
                            std::to_string(p));
            }
            if (std::abs(R.determinant() - 1.0) >= 1e-9) {
                return fail("det != 1 at heading " + std::to_string(h) + " pitch " +
                            std::to_string(p));
            }
        }
    }
    return pass();
}

PropResult geometry_roundtrip_identity(std::uint64_t seed, int cases) {
    Rng rng(seed);
    int done = 0;
    for (int attempt = 0; attempt < cases * 50 && done < cases; ++attempt) {
        const RandomShot s = random_shot(rng);
        const auto world = project_detection(s.md, s.u, s.v, s.cam, {});
        if (!world) continue;
        ++done;
        const auto back = forward_project(*world, s.md, s.cam, {});
        if (!back) return fail("round trip lost the point behind the camera");
        const double du = back->u - s.u;
        const double dv = back->v - s.v;
        if (std::hypot(du, dv) >= 1e-6) {
            return fail("round trip error " + fmt(std::hypot(du, dv)) + " px");
        }
    }
    if (done < cases) return fail("too few intersecting samples");
    return pass();
}

PropResult geometry_heading_wrap_invariance(std::uint64_t seed, int cases) {
    Rng rng(seed);
    int done = 0;
    for (int attempt = 0; attempt < cases * 50 && done < cases; ++attempt) {
        const RandomShot s = random_shot(rng);
        const auto a = project_detection(s.md, s.u, s.v, s.cam, {});
        if (!a) continue;
        ++done;
        FrameMetadata shifted = s.md;
        shifted.gimbal_heading += 360.0;
        const auto b = project_detection(shifted, s.u, s.v, s.cam, {});
        if (!b) return fail("heading + 360 lost the intersection");
        const double range = planar_distance(*a, drone_position(s.md, {}));
        if (planar_distance(*a, *b) >= 1e-6 * (1.0 + range)) {
            return fail("heading + 360 moved the point by " + fmt(planar_distance(*a, *b)));
        }
    }
    if (done < cases) return fail("too few intersecting samples");
    return pass();
}

PropResult geometry_gps_linear(std::uint64_t seed, int cases) {
    Rng rng(seed);
    const ReferenceOrigin origin{};
    for (int i = 0; i < cases; ++i) {
        const double lat1 = uniform(rng, -0.05, 0.05), lon1 = uniform(rng, -0.05, 0.05);
        const double lat2 = uniform(rng, -0.05, 0.05), lon2 = uniform(rng, -0.05, 0.05);
        const double a = uniform(rng, -2.0, 2.0), b = uniform(rng, -2.0, 2.0);
        const auto [x1, y1] = gps_to_local(lat1, lon1, origin);
        const auto [x2, y2] = gps_to_local(lat2, lon2, origin);
        const auto [xc, yc] = gps_to_local(a * lat1 + b * lat2, a * lon1 + b * lon2, origin);
        if (std::abs(xc - (a * x1 + b * x2)) >= 1e-6 || std::abs(yc - (a * y1 + b * y2)) >= 1e-6) {
            return fail("gps_to_local not linear at case " + std::to_string(i));
        }
    }
    return pass();
}

// ---------------------------------------------------------------------------
// assignment

PropResult check_matching_valid(const CostMatrix& m, const Matching& res, bool full) {
    std::vector<char> row_seen(static_cast<std::size_t>(m.rows), 0);
    std::vector<char> col_seen(static_cast<std::size_t>(m.cols), 0);
    for (const auto& [r, c] : res.pairs) {
        if (r < 0 || r >= m.rows || c < 0 || c >= m.cols) return fail("pair out of range");
        if (row_seen[r]++ || col_seen[c]++) return fail("row/col used twice");
    }
    for (int r : res.unmatched_rows) {
        if (row_seen[r]++) return fail("row both matched and unmatched");
    }
    for (int c : res.unmatched_cols) {
        if (col_seen[c]++) return fail("col both matched and unmatched");
    }
    for (char s : row_seen) {
        if (s != 1) return fail("row not covered exactly once");
    }
    for (char s : col_seen) {
        if (s != 1) return fail("col not covered exactly once");
    }
    if (full && static_cast<int>(res.pairs.size()) != std::min(m.rows, m.cols)) {
        return fail("full solve returned wrong cardinality");
    }
    return pass();
}

// Minimum pair-cost sum among gate-feasible matchings with exactly k pairs.
double brute_fixed_cardinality(const CostMatrix& m, int k) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> used(static_cast<std::size_t>(m.cols), 0);
    auto rec = [&](auto&& self, int r, int pairs, double acc) -> void {
        if (pairs == k) {
            best = std::min(best, acc);
            return;
        }
        if (r == m.rows) return;
        self(self, r + 1, pairs, acc);
        for (int c = 0; c < m.cols; ++c) {
            if (!used[c] && m.at(r, c) <= m.gate) {
                used[c] = 1;
                self(self, r + 1, pairs + 1, acc + m.at(r, c));
                used[c] = 0;
            }
        }
    };
    rec(rec, 0, 0, 0.0);
    return best;
}

PropResult assignment_optimality(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const bool integer_costs = chance(rng, 0.5);
        const double tol = integer_costs ? 0.0 : 1e-9;
        if (chance(rng, 0.5)) {
            const CostMatrix m = testsup::random_matrix(rng, 7, integer_costs, false);
            const Matching res = solve_min_cost(m);
            if (auto v = check_matching_valid(m, res, true); !v.ok) return v;
            const double oracle = testsup::brute_full_min(m);
            if (std::abs(res.total_cost - oracle) > tol) {
                return fail("ungated: got " + fmt(res.total_cost) + " oracle " + fmt(oracle));
            }
        } else {
            const CostMatrix m = testsup::random_matrix(rng, 5, integer_costs, true);
            const Matching res = solve_gated(m);
            if (auto v = check_matching_valid(m, res, false); !v.ok) return v;
            for (const auto& [r, c] : res.pairs) {
                if (m.at(r, c) > m.gate) return fail("pair above gate returned");
            }
            const double obj = testsup::gated_objective(m, res);
            const double oracle = testsup::brute_gated_min(m);
            if (std::abs(obj - oracle) > tol) {
                return fail("gated: objective " + fmt(obj) + " oracle " + fmt(oracle));
            }
            // Same-cardinality optimality: minimal pair-cost sum for this k.
            const double same_k = brute_fixed_cardinality(m, static_cast<int>(res.pairs.size()));
            if (std::abs(res.total_cost - same_k) > tol) {
                return fail("gated: pair sum " + fmt(res.total_cost) + " but k-pair optimum " +
                            fmt(same_k));
            }
        }
    }
    return pass();
}

PropResult assignment_permutation_equivariance(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        // Continuous costs: the optimum is unique with probability one.
        CostMatrix m = testsup::random_matrix(rng, 6, false, chance(rng, 0.5));
        std::vector<int> pr(static_cast<std::size_t>(m.rows)), pc(static_cast<std::size_t>(m.cols));
        for (int r = 0; r < m.rows; ++r) pr[r] = r;
        for (int c = 0; c < m.cols; ++c) pc[c] = c;
        std::shuffle(pr.begin(), pr.end(), rng);
        std::shuffle(pc.begin(), pc.end(), rng);
        CostMatrix p(m.rows, m.cols);
        p.gate = m.gate;
        for (int r = 0; r < m.rows; ++r) {
            for (int c = 0; c < m.cols; ++c) p.at(pr[r], pc[c]) = m.at(r, c);
        }
        const bool gated = std::isfinite(m.gate);
        const Matching res1 = gated ? solve_gated(m) : solve_min_cost(m);
        const Matching res2 = gated ? solve_gated(p) : solve_min_cost(p);
        std::set<std::pair<int, int>> mapped, got;
        for (const auto& [r, c] : res1.pairs) mapped.insert({pr[r], pc[c]});
        for (const auto& [r, c] : res2.pairs) got.insert({r, c});
        if (mapped != got) return fail("permuted matching differs at case " + std::to_string(i));
    }
    return pass();
}

PropResult assignment_shift_invariance(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const int n = uniform_int(rng, 2, 6);
        CostMatrix m(n, n);
        for (double& c : m.costs) c = uniform(rng, 0.0, 10.0);
        const double shift = uniform(rng, 0.1, 5.0);
        CostMatrix s = m;
        for (double& c : s.costs) c += shift;
        const Matching r1 = solve_min_cost(m);
        const Matching r2 = solve_min_cost(s);
        std::set<std::pair<int, int>> p1(r1.pairs.begin(), r1.pairs.end());
        std::set<std::pair<int, int>> p2(r2.pairs.begin(), r2.pairs.end());
        if (p1 != p2) return fail("constant shift changed the assignment");
        if (std::abs(r2.total_cost - (r1.total_cost + shift * n)) > 1e-6) {
            return fail("shifted total cost inconsistent");
        }
    }
    return pass();
}

PropResult assignment_determinism(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const CostMatrix m = testsup::random_matrix(rng, 6, true, chance(rng, 0.5));
        const bool gated = std::isfinite(m.gate);
        const Matching a = gated ? solve_gated(m) : solve_min_cost(m);
        const Matching b = gated ? solve_gated(m) : solve_min_cost(m);
        if (a.pairs != b.pairs || a.unmatched_rows != b.unmatched_rows ||
            a.unmatched_cols != b.unmatched_cols || a.total_cost != b.total_cost) {
            return fail("repeated solve differed at case " + std::to_string(i));
        }
    }
    return pass();
}

// ---------------------------------------------------------------------------
// reid

struct ReidCase {
    std::vector<Tracklet> tracklets;
    MetadataSequence metadata;
    CameraIntrinsics cam;
    ReidConfig cfg;
};

ReidCase random_reid_case(Rng& rng) {
    ReidCase rc;
    const int frames = uniform_int(rng, 12, 40);
    rc.metadata = hover_metadata(frames, uniform(rng, 40.0, 80.0));
    rc.cfg.tau_match_by_class = {{0, uniform(rng, 2.0, 20.0)}, {1, uniform(rng, 5.0, 40.0)}};
    const int nobj = uniform_int(rng, 1, 5);
    int next_id = 1;
    for (int k = 0; k < nobj; ++k) {
        const int class_id = uniform_int(rng, 0, 1);
        double u = uniform(rng, 100.0, 3740.0);
        double v = uniform(rng, 100.0, 2060.0);
        const double du = uniform(rng, -40.0, 40.0);
        const double dv = uniform(rng, -25.0, 25.0);
        const double side = uniform(rng, 20.0, 60.0);
        Tracklet cur;
        cur.id = next_id;
        cur.class_id = class_id;
        auto flush = [&]() {
            if (!cur.obs.empty()) {
                rc.tracklets.push_back(cur);
                cur = Tracklet{};
                cur.id = ++next_id;
                cur.class_id = class_id;
            }
        };
        for (int f = 1; f <= frames; ++f) {
            const double cu = u + du * (f - 1);
            const double cv = v + dv * (f - 1);
            const bool visible = cu >= 0.0 && cu <= 3840.0 && cv >= 0.0 && cv <= 2160.0;
            if (!visible || chance(rng, 0.08)) {  // out of view or dropped frame
                if (chance(rng, 0.6)) flush();
                continue;
            }
            if (chance(rng, 0.12)) flush();  // fragment boundary
            Observation o;
            o.frame = f;
            o.bbox = centered_box(cu, cv, side);
            o.confidence = uniform(rng, 0.5, 1.0);
            cur.obs.push_back(o);
        }
        flush();
        ++next_id;
    }
    return rc;
}

PropResult reid_preserves_observations(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const ReidCase rc = random_reid_case(rng);
        const auto before = obs_multiset(rc.tracklets);
        const StitchResult res = stitch(rc.tracklets, rc.metadata, rc.cam, rc.cfg);
        const auto after = obs_multiset(res.tracklets);
        if (before != after) {
            return fail("observation multiset changed at case " + std::to_string(i));
        }
    }
    return pass();
}

PropResult reid_no_duplicate_frames(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const ReidCase rc = random_reid_case(rng);
        const StitchResult res = stitch(rc.tracklets, rc.metadata, rc.cam, rc.cfg);
        for (const Tracklet& t : res.tracklets) {
            for (std::size_t k = 1; k < t.obs.size(); ++k) {
                if (t.obs[k].frame <= t.obs[k - 1].frame) {
                    return fail("track " + std::to_string(t.id) +
                                " frames not strictly increasing");
                }
            }
        }
    }
    return pass();
}

PropResult reid_class_separation(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const ReidCase rc = random_reid_case(rng);
        std::map<int, std::vector<Tracklet>> in_by_class, out_by_class;
        for (const Tracklet& t : rc.tracklets) in_by_class[t.class_id].push_back(t);
        const StitchResult res = stitch(rc.tracklets, rc.metadata, rc.cam, rc.cfg);
        for (const Tracklet& t : res.tracklets) out_by_class[t.class_id].push_back(t);
        for (const auto& [cls, ts] : in_by_class) {
            if (obs_multiset(ts) != obs_multiset(out_by_class[cls])) {
                return fail("class " + std::to_string(cls) + " observations leaked");
            }
        }
        for (const MergeRecord& m : res.report.merges) {
            if (m.class_id != 0 && m.class_id != 1) return fail("merge with unknown class");
        }
    }
    return pass();
}

PropResult reid_merge_cost_within_gate(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const ReidCase rc = random_reid_case(rng);
        const StitchResult res = stitch(rc.tracklets, rc.metadata, rc.cam, rc.cfg);
        for (const MergeRecord& m : res.report.merges) {
            if (!(m.cost <= m.gate + 1e-9)) {
                return fail("merge cost " + fmt(m.cost) + " above gate " + fmt(m.gate));
            }
        }
    }
    return pass();
}

PropResult reid_threshold_monotonicity(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        ReidCase rc = random_reid_case(rng);
        if (chance(rng, 0.5)) {
            // tau_match = 0: nothing may merge; partition identical up to relabel.
            rc.cfg.tau_match_by_class = {{0, 0.0}, {1, 0.0}};
            rc.cfg.tau_match_default = 0.0;
            const StitchResult res = stitch(rc.tracklets, rc.metadata, rc.cam, rc.cfg);
            std::vector<Tracklet> in = rc.tracklets;
            if (set_fingerprint(in, false) != set_fingerprint(res.tracklets, false)) {
                return fail("tau_match=0 changed the track partition");
            }
            if (res.report.short_term_merges != 0 || res.report.long_term_merges != 0) {
                return fail("tau_match=0 still reported merges");
            }
        } else {
            // tau_memory = 0: the long-term bank never offers a candidate.
            rc.cfg.tau_memory_by_class.clear();
            rc.cfg.tau_memory_default = 0.0;
            const StitchResult res = stitch(rc.tracklets, rc.metadata, rc.cam, rc.cfg);
            if (res.report.long_term_merges != 0) {
                return fail("tau_memory=0 produced long-term merges");
            }
        }
    }
    return pass();
}

PropResult reid_determinism(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const ReidCase rc = random_reid_case(rng);
        const StitchResult a = stitch(rc.tracklets, rc.metadata, rc.cam, rc.cfg);
        const StitchResult b = stitch(rc.tracklets, rc.metadata, rc.cam, rc.cfg);
        if (set_fingerprint(a.tracklets) != set_fingerprint(b.tracklets) ||
            a.report.short_term_merges != b.report.short_term_merges ||
            a.report.long_term_merges != b.report.long_term_merges) {
            return fail("stitch not deterministic at case " + std::to_string(i));
        }
    }
    return pass();
}

// ---------------------------------------------------------------------------
// pretrack

std::vector<Detection> random_detections(Rng& rng) {
    std::vector<Detection> dets;
    const int frames = uniform_int(rng, 5, 30);
    const int nobj = uniform_int(rng, 1, 5);
    for (int k = 0; k < nobj; ++k) {
        const int class_id = uniform_int(rng, 0, 1);
        double u = uniform(rng, 200.0, 3600.0);
        double v = uniform(rng, 200.0, 1900.0);
        const double du = uniform(rng, -10.0, 10.0);
        const double dv = uniform(rng, -6.0, 6.0);
        const double side = uniform(rng, 30.0, 60.0);
        for (int f = 1; f <= frames; ++f) {
            if (chance(rng, 0.15)) continue;
            Detection d;
            d.frame = f;
            d.bbox = centered_box(u + du * (f - 1), v + dv * (f - 1), side);
            d.confidence = uniform(rng, 0.05, 1.0);
            d.class_id = class_id;
            dets.push_back(d);
        }
    }
    const int clutter = uniform_int(rng, 0, 8);
    for (int k = 0; k < clutter; ++k) {
        Detection d;
        d.frame = uniform_int(rng, 1, frames);
        d.bbox = centered_box(uniform(rng, 100.0, 3700.0), uniform(rng, 100.0, 2000.0),
                              uniform(rng, 20.0, 80.0));
        d.confidence = uniform(rng, 0.05, 1.0);
        d.class_id = uniform_int(rng, 0, 1);
        dets.push_back(d);
    }
    std::shuffle(dets.begin(), dets.end(), rng);
    return dets;
}

PropResult pretrack_no_duplication(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const auto dets = random_detections(rng);
        const auto tracks = two_stage_track(dets);
        std::map<std::string, int> pool;
        for (const Detection& d : dets) pool[obs_key(d.frame, d.bbox, d.confidence, d.class_id)]++;
        for (const Tracklet& t : tracks) {
            for (const Observation& o : t.obs) {
                auto it = pool.find(obs_key(o.frame, o.bbox, o.confidence, t.class_id));
                if (it == pool.end() || it->second == 0) {
                    return fail("output observation not backed by a distinct input detection");
                }
                --it->second;
            }
        }
    }
    return pass();
}

PropResult pretrack_gap_bound(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        PretrackConfig cfg;
        cfg.buffer_frames = uniform_int(rng, 1, 10);
        const auto tracks = two_stage_track(random_detections(rng), cfg);
        for (const Tracklet& t : tracks) {
            for (std::size_t k = 1; k < t.obs.size(); ++k) {
                if (t.obs[k].frame - t.obs[k - 1].frame > cfg.buffer_frames) {
                    return fail("gap exceeds buffer_frames");
                }
            }
        }
    }
    return pass();
}

PropResult pretrack_iou_gate_respected(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        PretrackConfig cfg;
        cfg.iou_gate = uniform(rng, 0.2, 0.7);
        const auto tracks = two_stage_track(random_detections(rng), cfg);
        for (const Tracklet& t : tracks) {
            for (std::size_t k = 1; k < t.obs.size(); ++k) {
                // The carried-forward box is the previous observation itself.
                if (iou(t.obs[k - 1].bbox, t.obs[k].bbox) < cfg.iou_gate - 1e-12) {
                    return fail("association below the IoU gate");
                }
            }
        }
    }
    return pass();
}

// ---------------------------------------------------------------------------
// postprocess

Tracklet random_gappy_track(Rng& rng) {
    Tracklet t;
    t.id = 1;
    t.class_id = uniform_int(rng, 0, 1);
    double cu = uniform(rng, 200.0, 3600.0), cv = uniform(rng, 200.0, 1900.0);
    int f = 1;
    const int n = uniform_int(rng, 2, 25);
    for (int k = 0; k < n; ++k) {
        Observation o;
        o.frame = f;
        o.bbox = centered_box(cu, cv, uniform(rng, 20.0, 60.0));
        o.confidence = uniform(rng, 0.1, 1.0);
        t.obs.push_back(o);
        f += uniform_int(rng, 1, 12);  // gaps of 0..11 missing frames
        cu += uniform(rng, -30.0, 30.0);
        cv += uniform(rng, -20.0, 20.0);
    }
    return t;
}

PropResult postprocess_interpolation_superset(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const Tracklet t = random_gappy_track(rng);
        const int max_gap = uniform_int(rng, 0, 10);
        const Tracklet out = interpolate_track(t, max_gap);
        std::map<int, const Observation*> by_frame;
        for (const Observation& o : out.obs) by_frame[o.frame] = &o;
        for (const Observation& o : t.obs) {
            const auto it = by_frame.find(o.frame);
            if (it == by_frame.end()) return fail("original frame missing after interpolation");
            const Observation& q = *it->second;
            if (q.bbox.x != o.bbox.x || q.bbox.y != o.bbox.y || q.bbox.w != o.bbox.w ||
                q.bbox.h != o.bbox.h || q.confidence != o.confidence || q.interpolated) {
                return fail("original observation altered by interpolation");
            }
        }
    }
    return pass();
}

PropResult postprocess_no_small_gaps_left(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const Tracklet t = random_gappy_track(rng);
        const int max_gap = uniform_int(rng, 0, 10);
        const Tracklet out = interpolate_track(t, max_gap);
        for (std::size_t k = 1; k < out.obs.size(); ++k) {
            const int gap = out.obs[k].frame - out.obs[k - 1].frame - 1;
            if (gap != 0 && gap <= max_gap) {
                return fail("gap of " + std::to_string(gap) + " frames survived max_gap " +
                            std::to_string(max_gap));
            }
        }
    }
    return pass();
}

PropResult postprocess_nms_order_independent(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        std::vector<Detection> dets;
        const int clusters = uniform_int(rng, 1, 4);
        for (int c = 0; c < clusters; ++c) {
            const double cu = uniform(rng, 300.0, 3500.0);
            const double cv = uniform(rng, 300.0, 1800.0);
            const int n = uniform_int(rng, 1, 5);
            for (int k = 0; k < n; ++k) {
                Detection d;
                d.frame = 1;
                d.bbox = centered_box(cu + uniform(rng, -25.0, 25.0), cv + uniform(rng, -25.0, 25.0),
                                      uniform(rng, 30.0, 90.0));
                d.confidence = uniform(rng, 0.1, 1.0);
                dets.push_back(d);
            }
        }
        const double thr = uniform(rng, 0.3, 0.9);
        const auto kept1 = area_nms(dets, thr);
        std::vector<Detection> shuffled = dets;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto kept2 = area_nms(shuffled, thr);

        auto keys = [](const std::vector<Detection>& v) {
            std::vector<std::string> out;
            for (const Detection& d : v) out.push_back(obs_key(d.frame, d.bbox, d.confidence, d.class_id));
            std::sort(out.begin(), out.end());
            return out;
        };
        if (keys(kept1) != keys(kept2)) return fail("NMS kept set depends on input order");
        // Subset check.
        auto all = keys(dets);
        for (const auto& k : keys(kept1)) {
            if (!std::binary_search(all.begin(), all.end(), k)) return fail("NMS invented a box");
        }
    }
    return pass();
}

// ---------------------------------------------------------------------------
// metrics

struct Scene {
    std::vector<Tracklet> gt;
    std::vector<Tracklet> pred;
};

// Well-separated lanes: predictions can only ever match their own lane's GT.
Scene random_scene(Rng& rng, bool with_fp) {
    Scene s;
    const int lanes = uniform_int(rng, 1, 4);
    const int horizon = uniform_int(rng, 8, 20);
    int pred_id = 100;
    for (int k = 0; k < lanes; ++k) {
        const int f0 = uniform_int(rng, 1, 3);
        const int f1 = uniform_int(rng, std::min(f0 + 3, horizon), horizon);
        const double x0 = uniform(rng, 100.0, 3200.0);
        const double dx = uniform(rng, -4.0, 4.0);
        const double y = 200.0 + 300.0 * k;
        Tracklet g;
        g.id = k + 1;
        for (int f = f0; f <= f1; ++f) {
            Observation o;
            o.frame = f;
            o.bbox = centered_box(x0 + dx * (f - f0), y, 40.0);
            o.confidence = 1.0;
            g.obs.push_back(o);
        }
        s.gt.push_back(g);

        Tracklet p;
        p.id = pred_id++;
        for (const Observation& o : g.obs) {
            if (chance(rng, 0.12)) continue;  // deletion
            if (!p.obs.empty() && chance(rng, 0.08)) {  // identity split
                s.pred.push_back(p);
                p = Tracklet{};
                p.id = pred_id++;
            }
            Observation q = o;
            q.bbox.x += uniform(rng, -2.0, 2.0);
            q.bbox.y += uniform(rng, -2.0, 2.0);
            q.confidence = uniform(rng, 0.5, 1.0);
            p.obs.push_back(q);
        }
        if (!p.obs.empty()) s.pred.push_back(p);
    }
    if (with_fp) {
        const int nfp = uniform_int(rng, 0, 3);
        for (int k = 0; k < nfp; ++k) {
            Tracklet p;
            p.id = pred_id++;
            Observation o;
            o.frame = uniform_int(rng, 1, horizon);
            // Off-lane: midway between lanes, disjoint from every GT box.
            o.bbox = centered_box(uniform(rng, 100.0, 3200.0),
                                  350.0 + 300.0 * uniform_int(rng, 0, lanes - 1), 40.0);
            o.confidence = 0.9;
            p.obs.push_back(o);
            s.pred.push_back(p);
        }
    }
    // Keep every pred frame within the GT frame range.
    int gt_min = 1 << 30, gt_max = 0;
    for (const Tracklet& g : s.gt) {
        gt_min = std::min(gt_min, g.entry_frame());
        gt_max = std::max(gt_max, g.exit_frame());
    }
    for (auto& p : s.pred) {
        std::erase_if(p.obs, [&](const Observation& o) { return o.frame < gt_min || o.frame > gt_max; });
    }
    std::erase_if(s.pred, [](const Tracklet& t) { return t.obs.empty(); });
    return s;
}

PropResult metrics_self_evaluation(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const Scene s = random_scene(rng, false);
        const EvalResult r = evaluate(s.gt, s.gt);
        if (r.idf1 != 1.0 || r.mota != 1.0 || r.recall != 1.0 || r.precision != 1.0 ||
            r.idsw != 0 || r.fp != 0 || r.fn != 0) {
            return fail("evaluate(x, x) not perfect at case " + std::to_string(i));
        }
    }
    return pass();
}

PropResult metrics_relabel_invariance(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const Scene s = random_scene(rng, true);
        if (s.pred.empty()) continue;
        const EvalResult a = evaluate(s.gt, s.pred);
        std::vector<Tracklet> relabeled = s.pred;
        std::vector<int> ids;
        for (const Tracklet& t : relabeled) ids.push_back(t.id);
        std::vector<int> perm = ids;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t k = 0; k < relabeled.size(); ++k) relabeled[k].id = perm[k];
        const EvalResult b = evaluate(s.gt, relabeled);
        if (a.idf1 != b.idf1 || a.idp != b.idp || a.idr != b.idr || a.mota != b.mota ||
            a.fp != b.fp || a.fn != b.fn || a.idsw != b.idsw || a.frag != b.frag ||
            a.mt != b.mt || a.ml != b.ml || a.recall != b.recall || a.precision != b.precision) {
            return fail("bijective relabeling changed a metric at case " + std::to_string(i));
        }
    }
    return pass();
}

PropResult metrics_box_removal(std::uint64_t seed, int cases) {
    Rng rng(seed);
    int done = 0;
    for (int attempt = 0; attempt < cases * 10 && done < cases; ++attempt) {
        const Scene s = random_scene(rng, true);
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t t = 0; t < s.pred.size(); ++t) {
            for (std::size_t o = 0; o < s.pred[t].obs.size(); ++o) slots.emplace_back(t, o);
        }
        if (slots.empty()) continue;
        ++done;
        const auto [ti, oi] = slots[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(slots.size()) - 1))];
        std::vector<Tracklet> reduced = s.pred;
        reduced[ti].obs.erase(reduced[ti].obs.begin() + static_cast<std::ptrdiff_t>(oi));
        std::erase_if(reduced, [](const Tracklet& t) { return t.obs.empty(); });
        const EvalResult a = evaluate(s.gt, s.pred);
        const EvalResult b = evaluate(s.gt, reduced);
        const long long dfn = b.fn - a.fn;
        const long long dfp = b.fp - a.fp;
        const bool was_matched = (dfn == 1 && dfp == 0);
        const bool was_fp = (dfn == 0 && dfp == -1);
        if (!was_matched && !was_fp) {
            return fail("removal changed FP/FN by (" + std::to_string(dfp) + "," +
                        std::to_string(dfn) + ")");
        }
    }
    if (done < cases) return fail("not enough removable scenes generated");
    return pass();
}

// ---------------------------------------------------------------------------
// io

std::vector<Tracklet> random_quantized_tracks(Rng& rng) {
    std::vector<Tracklet> ts;
    const int n = uniform_int(rng, 1, 6);
    for (int k = 0; k < n; ++k) {
        Tracklet t;
        t.id = k + 1;
        t.class_id = uniform_int(rng, 0, 5);
        int f = uniform_int(rng, 1, 4);
        const int len = uniform_int(rng, 1, 12);
        for (int j = 0; j < len; ++j) {
            Observation o;
            o.frame = f;
            // Half-pixel grid keeps %.6g serialization lossless.
            o.bbox = BBox{uniform_int(rng, 0, 7000) / 2.0, uniform_int(rng, 0, 4000) / 2.0,
                          uniform_int(rng, 1, 800) / 2.0, uniform_int(rng, 1, 600) / 2.0};
            o.confidence = uniform_int(rng, 0, 1000) / 1000.0;
            o.interpolated = chance(rng, 0.2);
            t.obs.push_back(o);
            f += uniform_int(rng, 1, 5);
        }
        ts.push_back(t);
    }
    return ts;
}

PropResult io_roundtrip_stability(std::uint64_t seed, int cases) {
    Rng rng(seed);
    testsup::TempDir dir("io_prop");
    const auto path = (dir.path() / "tracks.csv").string();
    for (int i = 0; i < cases; ++i) {
        const auto ts = random_quantized_tracks(rng);
        write_tracklets(path, ts, /*debug_flags=*/true);
        const MotData back = read_mot(path);
        if (set_fingerprint(ts) != set_fingerprint(back.tracklets)) {
            return fail("read(write(x)) != x at case " + std::to_string(i));
        }
        // Canonical-file stability: rewriting what was read reproduces the bytes.
        const std::string bytes1 = testsup::slurp(path);
        const auto path2 = (dir.path() / "tracks2.csv").string();
        write_tracklets(path2, back.tracklets, /*debug_flags=*/true);
        if (bytes1 != testsup::slurp(path2)) {
            return fail("write(read(f)) != f at case " + std::to_string(i));
        }
    }
    return pass();
}

PropResult io_rejects_degenerate_boxes(std::uint64_t seed, int cases) {
    Rng rng(seed);
    testsup::TempDir dir("io_rej");
    const auto path = dir.path() / "bad.csv";
    for (int i = 0; i < cases; ++i) {
        const auto ts = random_quantized_tracks(rng);
        write_tracklets(path.string(), ts, false);
        std::istringstream in(testsup::slurp(path));
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
        const int victim = uniform_int(rng, 0, static_cast<int>(lines.size()) - 1);
        std::vector<std::string> fields;
        std::istringstream ls(lines[static_cast<std::size_t>(victim)]);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        fields[chance(rng, 0.5) ? 4 : 5] = chance(rng, 0.5) ? "0" : "-4.5";
        std::string rebuilt;
        for (std::size_t k = 0; k < fields.size(); ++k) {
            rebuilt += fields[k];
            if (k + 1 < fields.size()) rebuilt += ",";
        }
        lines[static_cast<std::size_t>(victim)] = rebuilt;
        std::string text;
        for (const auto& l : lines) {
            text += l;
            text += "\n";
        }
        testsup::spit(path, text);
        bool threw = false;
        try {
            read_mot(path.string());
        } catch (const ParseError& e) {
            threw = true;
            const std::string want = "line " + std::to_string(victim + 1);
            if (std::string(e.what()).find(want) == std::string::npos) {
                return fail("error did not name " + want + ": " + e.what());
            }
        }
        if (!threw) return fail("degenerate box accepted at case " + std::to_string(i));
    }
    return pass();
}

PropResult io_metadata_roundtrip(std::uint64_t seed, int cases) {
    Rng rng(seed);
    testsup::TempDir dir("io_md");
    const auto path = (dir.path() / "metadata.json").string();
    for (int i = 0; i < cases; ++i) {
        std::vector<FrameMetadata> records;
        const int n = uniform_int(rng, 1, 20);
        for (int f = 1; f <= n; ++f) {
            FrameMetadata md;
            md.frame_index = f;
            md.gps_latitude = uniform(rng, -0.01, 0.01);
            md.gps_longitude = uniform(rng, -0.01, 0.01);
            md.altitude = uniform(rng, 5.0, 200.0);
            md.gimbal_pitch = uniform(rng, 0.0, 90.0);
            md.gimbal_heading = uniform(rng, 0.0, 360.0);
            if (md.gimbal_heading >= 360.0) md.gimbal_heading = 0.0;
            md.x_speed = uniform(rng, -10.0, 10.0);
            md.y_speed = uniform(rng, -10.0, 10.0);
            md.z_speed = uniform(rng, -3.0, 3.0);
            records.push_back(md);
        }
        const MetadataSequence seq(records);
        write_metadata(path, seq);
        const MetadataSequence back = read_metadata(path);
        if (back.size() != seq.size()) return fail("metadata record count changed");
        for (std::size_t k = 0; k < records.size(); ++k) {
            const FrameMetadata& a = seq.records()[k];
            const FrameMetadata& b = back.records()[k];
            if (a.frame_index != b.frame_index || a.gps_latitude != b.gps_latitude ||
                a.gps_longitude != b.gps_longitude || a.altitude != b.altitude ||
                a.gimbal_pitch != b.gimbal_pitch || a.gimbal_heading != b.gimbal_heading ||
                a.x_speed != b.x_speed || a.y_speed != b.y_speed || a.z_speed != b.z_speed) {
                return fail("metadata round trip lost precision at record " + std::to_string(k));
            }
        }
    }
    return pass();
}

// ---------------------------------------------------------------------------
// simgen

ScenarioSpec random_scenario(Rng& rng) {
    ScenarioSpec spec;
    spec.duration = uniform_int(rng, 20, 60);
    spec.fps = uniform(rng, 10.0, 30.0);
    spec.seed = rng();
    const int wp = uniform_int(rng, 2, 3);
    int f = 1;
    for (int k = 0; k < wp; ++k) {
        Waypoint w;
        w.frame = f;
        w.x = uniform(rng, -150.0, 150.0);
        w.y = uniform(rng, -150.0, 150.0);
        w.altitude = uniform(rng, 30.0, 80.0);
        spec.waypoints.push_back(w);
        f += uniform_int(rng, 5, spec.duration / 2 + 5);
    }
    GimbalKey g1{1, uniform(rng, 50.0, 90.0), uniform(rng, 0.0, 359.0)};
    GimbalKey g2{spec.duration, g1.pitch_deg + uniform(rng, -10.0, 10.0),
                 g1.heading_deg + uniform(rng, -20.0, 20.0)};
    g2.pitch_deg = std::clamp(g2.pitch_deg, 30.0, 90.0);
    g2.heading_deg = std::fmod(g2.heading_deg + 360.0, 360.0);
    spec.gimbal = {g1, g2};
    const int nobj = uniform_int(rng, 1, 4);
    for (int k = 0; k < nobj; ++k) {
        ObjectSpec o;
        o.class_id = uniform_int(rng, 0, 1);
        o.x = spec.waypoints.front().x + uniform(rng, -50.0, 50.0);
        o.y = spec.waypoints.front().y + uniform(rng, -50.0, 50.0);
        o.vx = uniform(rng, -2.0, 2.0);
        o.vy = uniform(rng, -2.0, 2.0);
        if (chance(rng, 0.3)) {
            o.maneuvers.push_back(
                {uniform_int(rng, 2, spec.duration), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)});
        }
        spec.objects.push_back(o);
    }
    spec.dropout = chance(rng, 0.5) ? uniform(rng, 0.0, 0.3) : 0.0;
    spec.noise_px = chance(rng, 0.5) ? uniform(rng, 0.0, 2.0) : 0.0;
    spec.conf_base = uniform(rng, 0.5, 0.95);
    spec.conf_jitter = uniform(rng, 0.0, 0.05);
    if (chance(rng, 0.4)) {
        const int b = uniform_int(rng, 2, spec.duration - 1);
        spec.fragments.push_back({b, uniform_int(rng, b, spec.duration), -1});
    }
    return spec;
}

std::string sim_fingerprint(const SimOutput& s) {
    std::string out = set_fingerprint(s.gt);
    for (const Detection& d : s.detections) {
        out += obs_key(d.frame, d.bbox, d.confidence, d.class_id);
        out += "\n";
    }
    for (const FrameMetadata& md : s.metadata.records()) {
        out += std::to_string(md.frame_index) + "," + fmt(md.gps_latitude) + "," +
               fmt(md.gps_longitude) + "," + fmt(md.altitude) + "," + fmt(md.gimbal_pitch) + "," +
               fmt(md.gimbal_heading) + "," + fmt(md.x_speed) + "," + fmt(md.y_speed) + "," +
               fmt(md.z_speed) + "\n";
    }
    return out;
}

PropResult simgen_seed_determinism(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const ScenarioSpec spec = random_scenario(rng);
        if (sim_fingerprint(generate(spec)) != sim_fingerprint(generate(spec))) {
            return fail("same seed produced different outputs at case " + std::to_string(i));
        }
    }
    return pass();
}

PropResult simgen_metadata_consistency(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        ScenarioSpec spec = random_scenario(rng);
        spec.noise_px = 0.0;
        const SimOutput sim = generate(spec);
        // Independently integrate each object's piecewise-constant velocity.
        for (std::size_t k = 0; k < sim.gt.size(); ++k) {
            const Tracklet& g = sim.gt[k];
            const ObjectSpec& o = spec.objects[static_cast<std::size_t>(g.id - 1)];
            double px = o.x, py = o.y, vx = o.vx, vy = o.vy;
            std::size_t mi = 0;
            int frame = 1;
            std::map<int, WorldPoint> pos;
            for (frame = 1; frame <= spec.duration; ++frame) {
                while (mi < o.maneuvers.size() && o.maneuvers[mi].frame <= frame) {
                    vx = o.maneuvers[mi].vx;
                    vy = o.maneuvers[mi].vy;
                    ++mi;
                }
                pos[frame] = WorldPoint{px, py, 0.0};
                px += vx / spec.fps;
                py += vy / spec.fps;
            }
            for (const Observation& ob : g.obs) {
                const FrameMetadata* md = sim.metadata.find(ob.frame);
                if (!md) return fail("gt frame without metadata record");
                const auto world =
                    project_detection(*md, ob.bbox.cx(), ob.bbox.cy(), spec.camera, spec.origin);
                if (!world) return fail("gt box center does not project");
                if (planar_distance(*world, pos[ob.frame]) >= 1e-6) {
                    return fail("metadata inconsistent with rendered geometry: off by " +
                                fmt(planar_distance(*world, pos[ob.frame])));
                }
            }
        }
    }
    return pass();
}

PropResult simgen_detections_in_bounds(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const ScenarioSpec spec = random_scenario(rng);
        const SimOutput sim = generate(spec);
        for (const Detection& d : sim.detections) {
            if (d.bbox.x < 0.0 || d.bbox.y < 0.0 || d.bbox.x + d.bbox.w > spec.camera.width ||
                d.bbox.y + d.bbox.h > spec.camera.height) {
                return fail("detection outside image bounds");
            }
        }
    }
    return pass();
}

// ---------------------------------------------------------------------------
// kernels (parallel paths vs serial references)

PropResult kernels_projection_parity(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const int frames = uniform_int(rng, 3, 20);
        const MetadataSequence md = hover_metadata(frames, uniform(rng, 30.0, 90.0),
                                                   uniform(rng, 30.0, 90.0), uniform(rng, 0.0, 359.0));
        const CameraIntrinsics cam{};
        std::vector<ProjectionJob> jobs(static_cast<std::size_t>(uniform_int(rng, 1, 200)));
        for (auto& j : jobs) {
            j = {uniform_int(rng, 1, frames), uniform(rng, 0.0, 3840.0), uniform(rng, 0.0, 2160.0)};
        }
        const auto a = project_batch_serial(jobs, md, cam, {});
        const auto b = project_batch_parallel(jobs, md, cam, {}, uniform_int(rng, 1, 4));
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            if (a[k].has_value() != b[k].has_value()) return fail("hit/miss mismatch");
            if (a[k] && (a[k]->x != b[k]->x || a[k]->y != b[k]->y || a[k]->z != b[k]->z)) {
                return fail("projection differs between serial and parallel");
            }
        }
    }
    return pass();
}

PropResult kernels_calibration_parity(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const int frames = 12;
        std::vector<FrameMetadata> recs;
        for (int f = 1; f <= frames; ++f) {
            recs.push_back(make_pose(f, 2.0 * f, -1.5 * f, 50.0 + 0.2 * f, 60.0,
                                     std::fmod(10.0 * f, 360.0)));
        }
        const MetadataSequence md(recs);
        std::vector<CalibrationSegment> segments(static_cast<std::size_t>(uniform_int(rng, 1, 4)));
        for (auto& seg : segments) {
            const double cu = uniform(rng, 800.0, 3000.0), cv = uniform(rng, 500.0, 1600.0);
            for (int f = 1; f <= frames; ++f) seg.samples.emplace_back(md.at(f), PixelPoint{cu, cv});
        }
        const FovSearch search{uniform(rng, 40.0, 60.0), uniform(rng, 80.0, 110.0), 1.0};
        const auto a = calibration_grid_serial(segments, CameraIntrinsics{}, search, {});
        const auto b = calibration_grid_parallel(segments, CameraIntrinsics{}, search, {},
                                                 uniform_int(rng, 1, 4));
        if (a != b) return fail("calibration grid differs between serial and parallel");
    }
    return pass();
}

PropResult kernels_annotate_thread_invariance(std::uint64_t seed, int cases) {
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const ReidCase rc = random_reid_case(rng);
        std::vector<Tracklet> a = rc.tracklets;
        std::vector<Tracklet> b = rc.tracklets;
        annotate_world_points(a, rc.metadata, rc.cam, {}, 1);
        annotate_world_points(b, rc.metadata, rc.cam, {}, 3);
        for (std::size_t t = 0; t < a.size(); ++t) {
            for (std::size_t o = 0; o < a[t].obs.size(); ++o) {
                const auto& wa = a[t].obs[o].world;
                const auto& wb = b[t].obs[o].world;
                if (wa.has_value() != wb.has_value()) return fail("annotation hit/miss mismatch");
                if (wa && (wa->x != wb->x || wa->y != wb->y)) {
                    return fail("annotation differs across thread counts");
                }
                // Spot-check against the scalar projection.
                const auto ref = project_detection(rc.metadata.at(a[t].obs[o].frame),
                                                   a[t].obs[o].bbox.cx(), a[t].obs[o].bbox.cy(),
                                                   rc.cam, {});
                if (ref.has_value() != wa.has_value() || (ref && ref->x != wa->x)) {
                    return fail("annotation disagrees with project_detection");
                }
            }
        }
    }
    return pass();
}

// ---------------------------------------------------------------------------
// cli

struct CliBundle {
    testsup::TempDir dir{"cli_prop"};
    std::string metadata;
    std::string tracks;
    std::string gt;

    CliBundle() {
        ScenarioSpec spec;
        spec.duration = 12;
        spec.fps = 30.0;
        spec.seed = 11;
        spec.waypoints = {{1, 0.0, 0.0, 50.0}, {12, 6.0, 3.0, 50.0}};
        spec.gimbal = {{1, 90.0, 0.0}};
        spec.objects = {{0, 2.0, 1.0, 0.4, 0.0, {}}, {1, -8.0, -4.0, -0.5, 0.3, {}}};
        spec.conf_base = 0.9;
        const SimOutput sim = generate(spec);
        metadata = (dir.path() / "metadata.json").string();
        tracks = (dir.path() / "tracks.csv").string();
        gt = (dir.path() / "gt.csv").string();
        write_metadata(metadata, sim.metadata);
        write_tracklets(tracks, sim.gt);
        write_tracklets(gt, sim.gt);
    }
};

PropResult cli_exit_codes(std::uint64_t seed, int cases) {
    const std::string exe = cli_path();
    if (exe.empty()) return fail("cli path not configured");
    CliBundle bundle;
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        const int variant = uniform_int(rng, 0, 3);
        if (variant == 0) {
            const auto r = testsup::run_cmd(
                exe, "project 1 1920 1080 --metadata " + bundle.metadata, bundle.dir.path());
            if (r.exit_code != 0) return fail("valid project exited " + std::to_string(r.exit_code));
            if (r.out.find("x=") == std::string::npos) return fail("project printed no data");
            if (!r.err.empty()) return fail("clean run wrote to stderr: " + r.err);
        } else if (variant == 1) {
            const std::string missing =
                (bundle.dir.path() / ("nope_" + std::to_string(i) + ".json")).string();
            const auto r = testsup::run_cmd(exe, "project 1 5 5 --metadata " + missing,
                                            bundle.dir.path());
            if (r.exit_code != 2) return fail("missing file exited " + std::to_string(r.exit_code));
            if (r.err.find(missing) == std::string::npos) return fail("error did not name the path");
        } else if (variant == 2) {
            const auto r = testsup::run_cmd(exe, "evaluate " + bundle.gt + " " + bundle.gt,
                                            bundle.dir.path());
            if (r.exit_code != 0) return fail("evaluate exited " + std::to_string(r.exit_code));
            if (r.out.find("IDF1=1.000000") == std::string::npos) {
                return fail("self evaluation did not print IDF1=1.000000");
            }
        } else {
            const auto r = testsup::run_cmd(
                exe, "stitch --tracks " + bundle.tracks + " --metadata nowhere.json",
                bundle.dir.path());
            if (r.exit_code != 2) return fail("missing metadata exited " + std::to_string(r.exit_code));
        }
    }
    return pass();
}

PropResult cli_repeat_determinism(std::uint64_t seed, int cases) {
    const std::string exe = cli_path();
    if (exe.empty()) return fail("cli path not configured");
    CliBundle bundle;
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        std::string flags;
        if (chance(rng, 0.3)) flags += " --no-short-term";
        if (chance(rng, 0.3)) flags += " --no-long-term";
        if (chance(rng, 0.3)) flags += " --no-interp";
        flags += " --jobs " + std::to_string(uniform_int(rng, 0, 3));
        const auto out1 = bundle.dir.path() / ("o1_" + std::to_string(i));
        const auto out2 = bundle.dir.path() / ("o2_" + std::to_string(i));
        const std::string base =
            "stitch --tracks " + bundle.tracks + " --metadata " + bundle.metadata + flags;
        const auto r1 = testsup::run_cmd(exe, base + " --out " + out1.string(), bundle.dir.path());
        const auto r2 = testsup::run_cmd(exe, base + " --out " + out2.string(), bundle.dir.path());
        if (r1.exit_code != 0 || r2.exit_code != 0) return fail("stitch run failed");
        if (testsup::slurp(out1 / "tracks.csv") != testsup::slurp(out2 / "tracks.csv") ||
            testsup::slurp(out1 / "report.json") != testsup::slurp(out2 / "report.json")) {
            return fail("identical invocations produced different files");
        }
    }
    return pass();
}

}  // namespace

const std::vector<Property>& all_properties() {
    static const std::vector<Property> props = {
        {"geometry", "ground_intersect lies on the plane and on the ray",
         geometry_intersect_on_plane_and_ray},
        {"geometry", "rotation_from_gimbal is orthonormal with det +1 on a 1 degree grid",
         geometry_rotation_orthonormal},
        {"geometry", "forward_project inverts project_detection to < 1e-6 px",
         geometry_roundtrip_identity},
        {"geometry", "project_detection is invariant to heading + 360",
         geometry_heading_wrap_invariance},
        {"geometry", "gps_to_local is linear in its degree arguments", geometry_gps_linear},
        {"assignment", "solver matches the brute-force optimum (gated and ungated)",
         assignment_optimality},
        {"assignment", "permuting rows and columns permutes the matching identically",
         assignment_permutation_equivariance},
        {"assignment", "adding a constant leaves the square ungated argmin unchanged",
         assignment_shift_invariance},
        {"assignment", "identical inputs yield identical outputs", assignment_determinism},
        {"reid", "stitching preserves the observation multiset", reid_preserves_observations},
        {"reid", "merged tracklets have strictly increasing frames", reid_no_duplicate_frames},
        {"reid", "no merge joins tracklets of different classes", reid_class_separation},
        {"reid", "no merged pair exceeds its gate at merge time", reid_merge_cost_within_gate},
        {"reid", "tau_match=0 is a no-op and tau_memory=0 disables long-term merges",
         reid_threshold_monotonicity},
        {"reid", "stitch is deterministic", reid_determinism},
        {"pretrack", "every output observation maps to a distinct input detection",
         pretrack_no_duplication},
        {"pretrack", "no tracklet gap exceeds buffer_frames", pretrack_gap_bound},
        {"pretrack", "no association below the IoU gate", pretrack_iou_gate_respected},
        {"postprocess", "interpolation preserves originals bit-identically",
         postprocess_interpolation_superset},
        {"postprocess", "no fillable gap survives interpolation", postprocess_no_small_gaps_left},
        {"postprocess", "NMS kept set is independent of input order",
         postprocess_nms_order_independent},
        {"metrics", "evaluate(x, x) is perfect", metrics_self_evaluation},
        {"metrics", "bijective id relabeling changes no metric", metrics_relabel_invariance},
        {"metrics", "removing one pred box moves FN or FP by exactly one", metrics_box_removal},
        {"io", "track files round trip exactly", io_roundtrip_stability},
        {"io", "degenerate boxes are rejected with the offending line", io_rejects_degenerate_boxes},
        {"io", "metadata round trips at full precision", io_metadata_roundtrip},
        {"simgen", "same seed and spec give identical outputs", simgen_seed_determinism},
        {"simgen", "emitted metadata reproduces the rendered geometry", simgen_metadata_consistency},
        {"simgen", "every detection lies within image bounds", simgen_detections_in_bounds},
        {"kernels", "parallel batch projection equals the serial reference",
         kernels_projection_parity},
        {"kernels", "parallel calibration grid equals the serial reference",
         kernels_calibration_parity},
        {"kernels", "world-point annotation is thread-count invariant",
         kernels_annotate_thread_invariance},
        {"cli", "exit code 0 iff the run completed, 2 on missing inputs", cli_exit_codes},
        {"cli", "identical invocations produce identical output files", cli_repeat_determinism},
    };
    return props;
}

}  // namespace props
