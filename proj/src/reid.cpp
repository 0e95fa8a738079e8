#include "seastitch/reid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seastitch/assignment.hpp"
#include "seastitch/kernels.hpp"

namespace seastitch {
namespace {

const Observation* first_world_anchor(const Tracklet& t) {
    for (const auto& obs : t.obs) {
        if (obs.world) return &obs;
    }
    return nullptr;
}

const Observation* last_world_anchor(const Tracklet& t) {
    for (auto it = t.obs.rbegin(); it != t.obs.rend(); ++it) {
        if (it->world) return &*it;
    }
    return nullptr;
}

double planar_dist(const WorldPoint& a, const WorldPoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Entry-side world position at the tracklet's first frame. When the first
// anchor sits later than the entry frame (missing world points at the head),
// a sufficiently long tracklet is extrapolated backward to the entry frame.
WorldPoint entry_point(const Tracklet& t, int w) {
    const Observation* first = first_world_anchor(t);
    if (first->frame > t.entry_frame() && static_cast<int>(t.obs.size()) >= w) {
        const Velocity2 vel = entry_velocity(t, w);
        const double dt = first->frame - t.entry_frame();
        return WorldPoint{first->world->x - dt * vel.vx, first->world->y - dt * vel.vy, 0.0};
    }
    return *first->world;
}

enum class PassKind { Short, Long };

struct BankEntry {
    std::size_t unit;  // index of the unit's head tracklet in the working set
    int exit_frame;    // true last observation frame of the unit
    int anchor_frame;  // frame of the last world anchor (== exit_frame normally)
    WorldPoint anchor_world;
    Velocity2 velocity;
};

std::vector<Tracklet> run_pass(std::vector<Tracklet> work, PassKind kind,
                               const MetadataSequence& metadata, const CameraIntrinsics& cam,
                               const ReidConfig& cfg, const ReferenceOrigin& origin,
                               StitchReport* report) {
    const TerminationKind wanted =
        kind == PassKind::Short ? TerminationKind::MidImageLoss : TerminationKind::BorderExit;

    struct Event {
        int frame;
        int order;  // 0 = entry, 1 = exit; entries of a frame run first
        std::size_t idx;
        bool operator<(const Event& o) const {
            return std::tie(frame, order, idx) < std::tie(o.frame, o.order, o.idx);
        }
    };
    std::vector<Event> events;
    events.reserve(work.size() * 2);
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (work[i].obs.empty()) continue;
        events.push_back({work[i].entry_frame(), 0, i});
        events.push_back({work[i].exit_frame(), 1, i});
    }
    std::sort(events.begin(), events.end());

    std::vector<std::size_t> unit_of(work.size());
    std::iota(unit_of.begin(), unit_of.end(), std::size_t{0});
    std::vector<char> alive(work.size(), 1);
    std::map<int, std::vector<BankEntry>> banks;  // class -> exit states, oldest first

    std::size_t e = 0;
    while (e < events.size()) {
        const int f = events[e].frame;
        std::map<int, std::vector<std::size_t>> entering;  // class -> tracklet indices
        std::vector<std::size_t> exiting;
        for (; e < events.size() && events[e].frame == f; ++e) {
            if (events[e].order == 0) {
                entering[work[events[e].idx].class_id].push_back(events[e].idx);
            } else {
                exiting.push_back(events[e].idx);
            }
        }

        // Joint gated assignment of this frame's entering tracklets against the
        // class bank. Bank entries all exited strictly before f.
        for (auto& [cls, enters] : entering) {
            const double tau_match = cfg.tau_match(cls);
            const double tau_memory = cfg.tau_memory(cls);
            auto& bank = banks[cls];
            std::erase_if(bank, [&](const BankEntry& b) { return f - b.exit_frame >= tau_memory; });
            if (tau_match <= 0.0 || bank.empty()) continue;

            std::vector<std::size_t> cols;
            for (std::size_t idx : enters) {
                if (first_world_anchor(work[idx]) != nullptr) cols.push_back(idx);
            }
            if (cols.empty()) continue;

            const int rows = static_cast<int>(bank.size());
            CostMatrix m(rows, static_cast<int>(cols.size()));
            std::vector<double> row_gate(bank.size(), tau_match);
            std::vector<std::vector<double>> raw(bank.size(), std::vector<double>(cols.size(), 0.0));
            for (int r = 0; r < rows; ++r) {
                const BankEntry& b = bank[static_cast<std::size_t>(r)];
                if (kind == PassKind::Long) {
                    row_gate[static_cast<std::size_t>(r)] =
                        expanded_threshold(tau_match, cfg.lambda, f - b.exit_frame, 0.0);
                }
                for (int c = 0; c < m.cols; ++c) {
                    const Tracklet& enter = work[cols[static_cast<std::size_t>(c)]];
                    double cost;
                    if (kind == PassKind::Short) {
                        cost = planar_dist(b.anchor_world, *first_world_anchor(enter)->world);
                    } else {
                        const double dt = f - b.anchor_frame;
                        const WorldPoint pred{b.anchor_world.x + dt * b.velocity.vx,
                                              b.anchor_world.y + dt * b.velocity.vy, 0.0};
                        cost = planar_dist(pred, entry_point(enter, cfg.velocity_window));
                    }
                    raw[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = cost;
                    // Per-row gates are folded into the costs so one scalar gate
                    // (1.0) applies to the whole matrix.
                    m.at(r, c) = cost / row_gate[static_cast<std::size_t>(r)];
                }
            }
            m.gate = 1.0;
            const Matching result = solve_gated(m);

            std::vector<int> consumed_rows;
            for (const auto& [r, c] : result.pairs) {
                BankEntry& b = bank[static_cast<std::size_t>(r)];
                const std::size_t head = b.unit;
                const std::size_t j = cols[static_cast<std::size_t>(c)];
                if (report) {
                    MergeRecord rec;
                    rec.pass = kind == PassKind::Short ? 0 : 1;
                    rec.class_id = cls;
                    rec.into_id = work[head].id;
                    rec.absorbed_id = work[j].id;
                    rec.entry_frame = f;
                    rec.gap = f - b.exit_frame;
                    rec.cost = raw[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
                    rec.gate = row_gate[static_cast<std::size_t>(r)];
                    report->merges.push_back(rec);
                    if (kind == PassKind::Short) {
                        ++report->short_term_merges;
                        ++report->short_term_by_class[cls];
                    } else {
                        ++report->long_term_merges;
                        ++report->long_term_by_class[cls];
                    }
                }
                auto& dst = work[head].obs;
                dst.insert(dst.end(), work[j].obs.begin(), work[j].obs.end());
                work[j].obs.clear();
                alive[j] = 0;
                unit_of[j] = head;
                consumed_rows.push_back(r);
            }
            std::sort(consumed_rows.rbegin(), consumed_rows.rend());
            for (int r : consumed_rows) bank.erase(bank.begin() + r);
        }

        // Bank the units whose merged track ends at this frame.
        for (std::size_t idx : exiting) {
            const std::size_t head = unit_of[idx];
            if (!alive[head] || work[head].obs.back().frame != f) continue;
            if (classify_termination(work[head], metadata, cam, cfg, origin) != wanted) continue;
            const Observation* anchor = last_world_anchor(work[head]);
            if (anchor == nullptr) continue;  // no world evidence; cannot re-match
            BankEntry b;
            b.unit = head;
            b.exit_frame = f;
            b.anchor_frame = anchor->frame;
            b.anchor_world = *anchor->world;
            if (kind == PassKind::Long) b.velocity = exit_velocity(work[head], cfg.velocity_window);
            banks[work[head].class_id].push_back(b);
        }
    }

    std::vector<Tracklet> out;
    out.reserve(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (alive[i]) out.push_back(std::move(work[i]));
    }
    return out;
}

}  // namespace

Velocity2 exit_velocity(const Tracklet& t, int w) {
    const Observation* last = last_world_anchor(t);
    if (last == nullptr) return {};
    const int target = last->frame - w;
    const Observation* start = nullptr;
    for (const auto& obs : t.obs) {
        if (obs.world && obs.frame >= target) {
            start = &obs;
            break;
        }
    }
    if (start == nullptr || start->frame == last->frame) return {};
    const double dt = last->frame - start->frame;
    return {(last->world->x - start->world->x) / dt, (last->world->y - start->world->y) / dt};
}

Velocity2 entry_velocity(const Tracklet& t, int w) {
    const Observation* first = first_world_anchor(t);
    if (first == nullptr) return {};
    const int target = first->frame + w;
    const Observation* end = nullptr;
    for (auto it = t.obs.rbegin(); it != t.obs.rend(); ++it) {
        if (it->world && it->frame <= target) {
            end = &*it;
            break;
        }
    }
    if (end == nullptr || end->frame == first->frame) return {};
    const double dt = end->frame - first->frame;
    return {(end->world->x - first->world->x) / dt, (end->world->y - first->world->y) / dt};
}

std::optional<WorldPoint> extrapolate(const ExitState& state, int dt, double tau_memory) {
    if (dt >= tau_memory) return std::nullopt;
    return WorldPoint{state.exit_world.x + dt * state.velocity.vx,
                      state.exit_world.y + dt * state.velocity.vy, 0.0};
}

double expanded_threshold(double tau_match, double lambda, double dt_exit, double dt_entry) {
    return tau_match * std::max(1.0, lambda * (dt_exit + dt_entry));
}

TerminationKind classify_termination(const Tracklet& t, const MetadataSequence& metadata,
                                     const CameraIntrinsics& cam, const ReidConfig& cfg,
                                     const ReferenceOrigin& origin) {
    const Observation& last = t.obs.back();
    const BBox& b = last.bbox;
    const double margin = cfg.border_margin;
    if (b.x < margin || b.y < margin || b.x + b.w > cfg.image_width - margin ||
        b.y + b.h > cfg.image_height - margin) {
        return TerminationKind::BorderExit;
    }
    if (last.world) {
        if (const FrameMetadata* next = metadata.find(last.frame + 1)) {
            const auto px = forward_project(*last.world, *next, cam, origin);
            if (!px || px->u < 0.0 || px->u >= cam.width || px->v < 0.0 || px->v >= cam.height) {
                return TerminationKind::BorderExit;
            }
        }
    }
    return TerminationKind::MidImageLoss;
}

std::vector<Tracklet> short_term_pass(std::vector<Tracklet> tracklets,
                                      const MetadataSequence& metadata,
                                      const CameraIntrinsics& cam, const ReidConfig& cfg,
                                      const ReferenceOrigin& origin, StitchReport* report) {
    return run_pass(std::move(tracklets), PassKind::Short, metadata, cam, cfg, origin, report);
}

std::vector<Tracklet> long_term_pass(std::vector<Tracklet> tracklets,
                                     const MetadataSequence& metadata, const CameraIntrinsics& cam,
                                     const ReidConfig& cfg, const ReferenceOrigin& origin,
                                     StitchReport* report) {
    return run_pass(std::move(tracklets), PassKind::Long, metadata, cam, cfg, origin, report);
}

StitchResult stitch(std::vector<Tracklet> tracklets, const MetadataSequence& metadata,
                    const CameraIntrinsics& cam, const ReidConfig& cfg,
                    const ReferenceOrigin& origin, const StitchOptions& options) {
    StitchResult result;
    std::erase_if(tracklets, [](const Tracklet& t) { return t.obs.empty(); });
    annotate_world_points(tracklets, metadata, cam, origin, options.jobs);
    if (options.short_term) {
        tracklets = short_term_pass(std::move(tracklets), metadata, cam, cfg, origin, &result.report);
    }
    if (options.long_term) {
        tracklets = long_term_pass(std::move(tracklets), metadata, cam, cfg, origin, &result.report);
    }
    std::stable_sort(tracklets.begin(), tracklets.end(),
                     [](const Tracklet& a, const Tracklet& b) {
                         return a.entry_frame() < b.entry_frame();
                     });
    int next_id = 1;
    for (auto& t : tracklets) t.id = next_id++;
    result.tracklets = std::move(tracklets);
    return result;
}

}  // namespace seastitch
