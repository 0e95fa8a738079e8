#include "seastitch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "seastitch/assignment.hpp"

namespace seastitch {
namespace {

struct Counts {
    long long tp{0}, fp{0}, fn{0}, idsw{0}, frag{0};
    long long gt_total{0}, pred_total{0}, idtp{0};
    int mt{0}, ml{0}, gt_tracks{0}, pred_tracks{0};
};

// Frames where a (gt track, pred track) pair overlaps with IoU >= threshold,
// counted independently of the CLEAR correspondence — the identity metrics
// run their own global matching over these.
void accumulate(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred, double thr,
                Counts& k) {
    std::map<int, std::vector<std::pair<int, BBox>>> gt_frames, pred_frames;
    std::map<int, long long> gt_len, pred_len;
    for (const auto& t : gt) {
        for (const auto& o : t.obs) {
            gt_frames[o.frame].emplace_back(t.id, o.bbox);
            ++gt_len[t.id];
        }
    }
    for (const auto& t : pred) {
        for (const auto& o : t.obs) {
            pred_frames[o.frame].emplace_back(t.id, o.bbox);
            ++pred_len[t.id];
        }
    }
    for (const auto& [id, len] : gt_len) k.gt_total += len;
    for (const auto& [id, len] : pred_len) k.pred_total += len;
    k.gt_tracks += static_cast<int>(gt_len.size());
    k.pred_tracks += static_cast<int>(pred_len.size());

    std::set<int> frames;
    for (const auto& [f, v] : gt_frames) frames.insert(f);
    for (const auto& [f, v] : pred_frames) frames.insert(f);

    std::map<int, int> prev, last_known;
    std::map<int, char> ever_covered, in_gap;
    std::map<int, long long> covered_frames;
    std::map<std::pair<int, int>, long long> overlap;
    static const std::vector<std::pair<int, BBox>> kNone;

    for (int f : frames) {
        const auto git = gt_frames.find(f);
        const auto pit = pred_frames.find(f);
        const auto& g = git != gt_frames.end() ? git->second : kNone;
        const auto& p = pit != pred_frames.end() ? pit->second : kNone;

        const auto cur = frame_match(g, p, thr, prev);
        k.tp += static_cast<long long>(cur.size());
        k.fp += static_cast<long long>(p.size()) - static_cast<long long>(cur.size());
        k.fn += static_cast<long long>(g.size()) - static_cast<long long>(cur.size());
        for (const auto& [gid, pid] : cur) {
            const auto it = last_known.find(gid);
            if (it != last_known.end() && it->second != pid) ++k.idsw;
            last_known[gid] = pid;
            ++covered_frames[gid];
        }
        for (const auto& [gid, box] : g) {
            if (cur.count(gid)) {
                if (in_gap[gid]) ++k.frag;
                in_gap[gid] = 0;
                ever_covered[gid] = 1;
            } else if (ever_covered[gid]) {
                in_gap[gid] = 1;
            }
        }
        for (const auto& [gid, gb] : g) {
            for (const auto& [pid, pb] : p) {
                if (iou(gb, pb) >= thr) ++overlap[{gid, pid}];
            }
        }
        prev = cur;
    }

    for (const auto& [id, len] : gt_len) {
        const double cov = static_cast<double>(covered_frames[id]) / static_cast<double>(len);
        if (cov >= 0.8) {
            ++k.mt;
        } else if (cov <= 0.2) {
            ++k.ml;
        }
    }

    // Global trajectory matching for the identity measures: square problem
    // with one dedicated dummy per track so any track may stay unmatched at
    // the price of all its frames.
    if (gt_len.empty() && pred_len.empty()) return;
    std::vector<int> gids, pids;
    for (const auto& [id, len] : gt_len) gids.push_back(id);
    for (const auto& [id, len] : pred_len) pids.push_back(id);
    const int ng = static_cast<int>(gids.size());
    const int np = static_cast<int>(pids.size());
    double big = 1.0;
    for (const auto& [id, len] : gt_len) big += static_cast<double>(len);
    for (const auto& [id, len] : pred_len) big += static_cast<double>(len);

    CostMatrix m(ng + np, np + ng);
    for (int r = 0; r < ng + np; ++r) {
        for (int c = 0; c < np + ng; ++c) {
            double cost;
            if (r < ng && c < np) {
                const auto it = overlap.find({gids[static_cast<std::size_t>(r)],
                                              pids[static_cast<std::size_t>(c)]});
                const long long ov = it != overlap.end() ? it->second : 0;
                cost = static_cast<double>(gt_len[gids[static_cast<std::size_t>(r)]] +
                                           pred_len[pids[static_cast<std::size_t>(c)]] - 2 * ov);
            } else if (r < ng) {
                cost = (c - np == r) ? static_cast<double>(gt_len[gids[static_cast<std::size_t>(r)]])
                                     : big;
            } else if (c < np) {
                cost = (r - ng == c) ? static_cast<double>(pred_len[pids[static_cast<std::size_t>(c)]])
                                     : big;
            } else {
                cost = 0.0;
            }
            m.at(r, c) = cost;
        }
    }
    const Matching result = solve_min_cost(m);
    // total cost = IDFN + IDFP, and IDTP = (sum of lengths - total) / 2.
    const double total = result.total_cost;
    k.idtp += static_cast<long long>(std::llround((big - 1.0 - total) / 2.0));
}

}  // namespace

std::map<int, int> frame_match(const std::vector<std::pair<int, BBox>>& gt,
                               const std::vector<std::pair<int, BBox>>& pred, double iou_threshold,
                               const std::map<int, int>& prev) {
    std::map<int, int> out;
    std::map<int, std::size_t> gt_pos, pred_pos;
    for (std::size_t i = 0; i < gt.size(); ++i) gt_pos[gt[i].first] = i;
    for (std::size_t i = 0; i < pred.size(); ++i) pred_pos[pred[i].first] = i;
    std::vector<char> gt_used(gt.size(), 0), pred_used(pred.size(), 0);

    for (const auto& [gid, pid] : prev) {
        const auto gi = gt_pos.find(gid);
        const auto pi = pred_pos.find(pid);
        if (gi == gt_pos.end() || pi == pred_pos.end()) continue;
        if (gt_used[gi->second] || pred_used[pi->second]) continue;
        if (iou(gt[gi->second].second, pred[pi->second].second) >= iou_threshold) {
            out[gid] = pid;
            gt_used[gi->second] = 1;
            pred_used[pi->second] = 1;
        }
    }

    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (!gt_used[i]) rows.push_back(i);
    }
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!pred_used[i]) cols.push_back(i);
    }
    if (!rows.empty() && !cols.empty()) {
        CostMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        m.gate = std::max(1.0 - iou_threshold, 1e-12);
        for (int r = 0; r < m.rows; ++r) {
            for (int c = 0; c < m.cols; ++c) {
                m.at(r, c) =
                    1.0 - iou(gt[rows[static_cast<std::size_t>(r)]].second,
                              pred[cols[static_cast<std::size_t>(c)]].second);
            }
        }
        const Matching result = solve_gated(m);
        for (const auto& [r, c] : result.pairs) {
            out[gt[rows[static_cast<std::size_t>(r)]].first] =
                pred[cols[static_cast<std::size_t>(c)]].first;
        }
    }
    return out;
}

EvalResult evaluate(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred,
                    double iou_threshold, bool class_aware) {
    long long gt_boxes = 0;
    int gt_min = 0, gt_max = 0;
    bool first = true;
    for (const auto& t : gt) {
        for (const auto& o : t.obs) {
            ++gt_boxes;
            gt_min = first ? o.frame : std::min(gt_min, o.frame);
            gt_max = first ? o.frame : std::max(gt_max, o.frame);
            first = false;
        }
    }
    if (gt_boxes == 0) throw std::invalid_argument("evaluate: empty ground truth");
    for (const auto& t : pred) {
        for (const auto& o : t.obs) {
            if (o.frame < gt_min || o.frame > gt_max) {
                throw FrameRangeMismatch("prediction frame " + std::to_string(o.frame) +
                                         " outside ground-truth range [" + std::to_string(gt_min) +
                                         ", " + std::to_string(gt_max) + "]");
            }
        }
    }

    Counts k;
    if (class_aware) {
        std::set<int> classes;
        for (const auto& t : gt) classes.insert(t.class_id);
        for (const auto& t : pred) classes.insert(t.class_id);
        for (int cls : classes) {
            std::vector<Tracklet> g, p;
            for (const auto& t : gt) {
                if (t.class_id == cls) g.push_back(t);
            }
            for (const auto& t : pred) {
                if (t.class_id == cls) p.push_back(t);
            }
            accumulate(g, p, iou_threshold, k);
        }
    } else {
        accumulate(gt, pred, iou_threshold, k);
    }

    EvalResult r;
    r.fp = k.fp;
    r.fn = k.fn;
    r.idsw = k.idsw;
    r.frag = k.frag;
    r.mt = k.mt;
    r.ml = k.ml;
    r.tp = k.tp;
    r.gt_total = k.gt_total;
    r.pred_total = k.pred_total;
    r.gt_tracks = k.gt_tracks;
    r.pred_tracks = k.pred_tracks;
    r.idtp = k.idtp;
    r.idfp = k.pred_total - k.idtp;
    r.idfn = k.gt_total - k.idtp;
    r.mota = 1.0 - static_cast<double>(k.fp + k.fn + k.idsw) / static_cast<double>(k.gt_total);
    r.recall = static_cast<double>(k.tp) / static_cast<double>(k.gt_total);
    r.precision = k.tp + k.fp > 0
                      ? static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fp)
                      : 0.0;
    const long long id_denom = 2 * k.idtp + r.idfp + r.idfn;
    r.idf1 = id_denom > 0 ? 2.0 * static_cast<double>(k.idtp) / static_cast<double>(id_denom) : 0.0;
    r.idp = k.pred_total > 0 ? static_cast<double>(k.idtp) / static_cast<double>(k.pred_total) : 0.0;
    r.idr = k.gt_total > 0 ? static_cast<double>(k.idtp) / static_cast<double>(k.gt_total) : 0.0;
    return r;
}

std::string to_kv(const EvalResult& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6);
    os << "IDF1=" << r.idf1 << "\n";
    os << "IDP=" << r.idp << "\n";
    os << "IDR=" << r.idr << "\n";
    os << "MOTA=" << r.mota << "\n";
    os << "Recall=" << r.recall << "\n";
    os << "Precision=" << r.precision << "\n";
    os << "FP=" << r.fp << "\n";
    os << "FN=" << r.fn << "\n";
    os << "IDSW=" << r.idsw << "\n";
    os << "Frag=" << r.frag << "\n";
    os << "MT=" << r.mt << "\n";
    os << "ML=" << r.ml << "\n";
    os << "GT=" << r.gt_total << "\n";
    os << "Pred=" << r.pred_total << "\n";
    return os.str();
}

}  // namespace seastitch
