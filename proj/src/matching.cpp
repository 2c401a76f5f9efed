#include "vrec/matching.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "vrec/errors.hpp"
#include "vrec/hungarian.hpp"
#include "vrec/log.hpp"

namespace vrec {

namespace {

std::vector<int> bifurcation_indexes(const VesselTree& t) {
    std::vector<int> out;
    for (size_t i = 0; i < t.nodes.size(); ++i)
        if (t.nodes[i].kind == NodeKind::bifurcation) out.push_back(static_cast<int>(i));
    return out;
}

Point2 node_pos(const VesselNode& n) { return {n.x, n.y}; }

// Remove child-side chains of pure edge nodes ending in a terminal below each
// listed node; returns the surviving tree with ids renumbered in order and a
// map old id -> new id.
VesselTree prune_terminal_branches(const VesselTree& tree, const std::set<int>& from_ids,
                                   std::unordered_map<int, int>& id_map) {
    auto ch = tree.children();
    std::unordered_map<int, int> idx;
    for (size_t i = 0; i < tree.nodes.size(); ++i) idx[tree.nodes[i].id] = static_cast<int>(i);

    std::vector<char> drop(tree.nodes.size(), 0);
    for (int id : from_ids) {
        int i = idx.at(id);
        for (int c : ch[i]) {
            // Walk the chain; collect while it stays a pure edge run.
            std::vector<int> chain;
            int cur = c;
            while (tree.nodes[cur].kind == NodeKind::edge) {
                chain.push_back(cur);
                cur = ch[cur][0];
            }
            if (tree.nodes[cur].kind == NodeKind::terminal) {
                chain.push_back(cur);
                for (int d : chain) drop[d] = 1;
            }
        }
    }

    VesselTree out;
    out.dimensionality = tree.dimensionality;
    id_map.clear();
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
        if (drop[i]) continue;
        VesselNode n = tree.nodes[i];
        int new_id = static_cast<int>(out.nodes.size()) + 1;
        id_map[n.id] = new_id;
        n.id = new_id;
        if (n.parent_id != -1) n.parent_id = id_map.at(n.parent_id);
        out.nodes.push_back(n);
    }
    out.reclassify();
    return out;
}

}  // namespace

BifurcationMatch match_bifurcations(const VesselTree& tree_a, const VesselTree& tree_b,
                                    const Affine2D& affine, double range_px) {
    if (range_px <= 0) throw ParameterError("match_bifurcations: range must be > 0");
    tree_a.validate();
    tree_b.validate();

    auto bifs_a = bifurcation_indexes(tree_a);
    auto bifs_b = bifurcation_indexes(tree_b);

    struct Cand {
        double dist;
        int ia, ib;
    };
    std::vector<Cand> cands;
    for (int ia : bifs_a) {
        Point2 predicted = apply_affine(affine, node_pos(tree_a.nodes[ia]));
        for (int ib : bifs_b) {
            double d = (node_pos(tree_b.nodes[ib]) - predicted).norm();
            if (d <= range_px) cands.push_back({d, ia, ib});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) {
        if (l.dist != r.dist) return l.dist < r.dist;
        if (l.ia != r.ia) return l.ia < r.ia;
        return l.ib < r.ib;
    });

    std::set<int> used_a, used_b;
    std::vector<std::pair<int, int>> matches;  // node indexes (a, b)
    for (const Cand& c : cands) {
        if (used_a.count(c.ia) || used_b.count(c.ib)) continue;
        used_a.insert(c.ia);
        used_b.insert(c.ib);
        matches.emplace_back(c.ia, c.ib);
    }
    if (matches.empty()) throw MatchError("match_bifurcations: no bifurcation matched within range");

    std::set<int> unmatched_a, unmatched_b;
    for (int ia : bifs_a)
        if (!used_a.count(ia)) unmatched_a.insert(tree_a.nodes[ia].id);
    for (int ib : bifs_b)
        if (!used_b.count(ib)) unmatched_b.insert(tree_b.nodes[ib].id);
    if (!unmatched_a.empty() || !unmatched_b.empty())
        log::info("match_bifurcations: pruning branches of " +
                  std::to_string(unmatched_a.size()) + "+" + std::to_string(unmatched_b.size()) +
                  " unmatched bifurcation(s)");

    BifurcationMatch result;
    std::unordered_map<int, int> map_a, map_b;
    result.pruned_a = prune_terminal_branches(tree_a, unmatched_a, map_a);
    result.pruned_b = prune_terminal_branches(tree_b, unmatched_b, map_b);

    std::sort(matches.begin(), matches.end());
    for (auto [ia, ib] : matches) {
        Correspondence c;
        c.point_a = node_pos(tree_a.nodes[ia]);
        c.point_b = node_pos(tree_b.nodes[ib]);
        c.provenance = Provenance::bifurcation;
        c.node_a = map_a.at(tree_a.nodes[ia].id);
        c.node_b = map_b.at(tree_b.nodes[ib].id);
        result.seed.pairs.push_back(c);
    }
    return result;
}

namespace {

struct Branch {
    int top_id = -1;             // junction on the root side
    int far_id = -1;             // junction at the other end
    std::vector<int> point_ids;  // interior edge nodes, plus far when terminal
};

// Branches of a tree: maximal edge-node chains between junction nodes
// (terminal / bifurcation / root), walked child-side from each junction.
std::vector<Branch> enumerate_branches(const VesselTree& t) {
    auto ch = t.children();
    std::vector<Branch> out;
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i].kind == NodeKind::edge) continue;
        for (int c : ch[i]) {
            Branch b;
            b.top_id = t.nodes[i].id;
            int cur = c;
            while (t.nodes[cur].kind == NodeKind::edge) {
                b.point_ids.push_back(t.nodes[cur].id);
                cur = ch[cur][0];
            }
            b.far_id = t.nodes[cur].id;
            if (t.nodes[cur].kind == NodeKind::terminal) b.point_ids.push_back(b.far_id);
            out.push_back(std::move(b));
        }
    }
    std::sort(out.begin(), out.end(), [](const Branch& l, const Branch& r) {
        if (l.top_id != r.top_id) return l.top_id < r.top_id;
        return l.far_id < r.far_id;
    });
    return out;
}

std::vector<int> evenly_subsample(const std::vector<int>& ids, int cap) {
    const int n = static_cast<int>(ids.size());
    if (n <= cap) return ids;
    std::vector<int> out;
    out.reserve(cap);
    for (int k = 0; k < cap; ++k) {
        int i = static_cast<int>(std::llround(static_cast<double>(k) * (n - 1) / (cap - 1)));
        out.push_back(ids[i]);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Arc length of each node along the polyline top..far, keyed by node id.
std::unordered_map<int, double> arc_lengths(const VesselTree& t, const Branch& b,
                                            const std::unordered_map<int, int>& idx) {
    std::unordered_map<int, double> arc;
    double s = 0.0;
    Point2 prev = node_pos(t.nodes[idx.at(b.top_id)]);
    for (int id : b.point_ids) {
        Point2 p = node_pos(t.nodes[idx.at(id)]);
        s += (p - prev).norm();
        arc[id] = s;
        prev = p;
    }
    return arc;
}

Point2 point_at_arc(const VesselTree& t, const Branch& b,
                    const std::unordered_map<int, int>& idx, double target) {
    Point2 prev = node_pos(t.nodes[idx.at(b.top_id)]);
    double s = 0.0;
    for (int id : b.point_ids) {
        Point2 p = node_pos(t.nodes[idx.at(id)]);
        double seg = (p - prev).norm();
        if (s + seg >= target && seg > 0) {
            double f = (target - s) / seg;
            return prev + f * (p - prev);
        }
        s += seg;
        prev = p;
    }
    return prev;
}

}  // namespace

CorrespondenceSet dense_match(const VesselTree& pruned_a, const VesselTree& pruned_b,
                              const CorrespondenceSet& seed, const DenseMatchParams& params) {
    if (seed.empty()) throw MatchError("dense_match: empty seed correspondence set");
    params.gp.validate();
    if (params.gate <= 0) throw ParameterError("dense_match: gate must be > 0");
    if (params.max_edge_points < 2) throw ParameterError("dense_match: max_edge_points must be >= 2");

    std::unordered_map<int, int> idx_a, idx_b;
    for (size_t i = 0; i < pruned_a.nodes.size(); ++i) idx_a[pruned_a.nodes[i].id] = static_cast<int>(i);
    for (size_t i = 0; i < pruned_b.nodes.size(); ++i) idx_b[pruned_b.nodes[i].id] = static_cast<int>(i);

    std::unordered_map<int, int> bif_map;  // A junction id -> B junction id
    std::vector<Point2> train_b, train_a;
    for (const Correspondence& c : seed.pairs) {
        if (c.node_a >= 0 && c.node_b >= 0) bif_map[c.node_a] = c.node_b;
        train_b.push_back(c.point_b);
        train_a.push_back(c.point_a);
    }
    // The GP is zero-mean, so regress about the correspondence centroids;
    // far queries then fall back to the centroid shift instead of collapsing
    // toward the origin.
    auto centroid = [](const std::vector<Point2>& pts) {
        Point2 c{0, 0};
        for (const Point2& p : pts) c += p;
        return Point2(c / double(pts.size()));
    };

    auto branches_a = enumerate_branches(pruned_a);
    auto branches_b = enumerate_branches(pruned_b);
    std::vector<char> b_used(branches_b.size(), 0);

    auto is_terminal = [](const VesselTree& t, int idx) {
        return t.nodes[idx].kind == NodeKind::terminal;
    };
    // Flip a branch so its far junction becomes the top. A terminal that
    // enters or leaves the point list is handled; bifurcation ends never sit
    // in the list.
    auto reverse_branch = [&](const VesselTree& t, const std::unordered_map<int, int>& idx,
                              Branch& b) {
        int old_top = b.top_id, old_far = b.far_id;
        if (!b.point_ids.empty() && b.point_ids.back() == old_far) b.point_ids.pop_back();
        std::reverse(b.point_ids.begin(), b.point_ids.end());
        b.top_id = old_far;
        b.far_id = old_top;
        if (is_terminal(t, idx.at(old_top))) b.point_ids.push_back(old_top);
    };

    CorrespondenceSet out = seed;
    int total_crossings = 0;

    for (const Branch& ba_orig : branches_a) {
        bool top_matched = bif_map.count(ba_orig.top_id) > 0;
        bool far_matched = bif_map.count(ba_orig.far_id) > 0;
        if (!top_matched && !far_matched) continue;

        // Canonical orientation: the matched junction leads.
        Branch ba = ba_orig;
        if (!top_matched) {
            reverse_branch(pruned_a, idx_a, ba);
            std::swap(top_matched, far_matched);
        }
        if (ba.point_ids.empty()) continue;

        // GP on the current correspondence set; affine fallback on failure.
        const Point2 center_b = centroid(train_b);
        const Point2 center_a = centroid(train_a);
        std::optional<GPModel> gp;
        std::optional<Affine2D> fallback;  // maps B -> A
        try {
            std::vector<Point2> cb(train_b.size()), ca(train_a.size());
            for (size_t i = 0; i < train_b.size(); ++i) {
                cb[i] = train_b[i] - center_b;
                ca[i] = train_a[i] - center_a;
            }
            gp.emplace(cb, ca, params.gp);
        } catch (const ConditioningError& e) {
            log::warn(std::string("dense_match: GP fit failed (") + e.what() +
                      "), using affine fallback for this branch pair");
            std::vector<std::pair<Point2, Point2>> ba_pairs;
            for (size_t i = 0; i < train_b.size(); ++i) ba_pairs.emplace_back(train_b[i], train_a[i]);
            try {
                fallback = estimate_affine(ba_pairs).transform;
            } catch (const ConditioningError&) {
                log::warn("dense_match: affine fallback degenerate, skipping branch pair");
                continue;
            }
        }
        auto predict = [&](const Point2& pb) -> GPPrediction {
            if (gp) {
                GPPrediction p = gp->predict(pb - center_b);
                p.mean += center_a;
                return p;
            }
            // Prior variance stands in for the missing posterior.
            double prior = gp_kernel(pb - center_b, pb - center_b, params.gp);
            return {apply_affine(*fallback, pb), prior};
        };

        // Find the matching B branch; it gets the same canonical orientation.
        const int b_top = bif_map.at(ba.top_id);
        int chosen = -1;
        bool rev_b = false;
        if (far_matched) {
            const int b_far = bif_map.at(ba.far_id);
            for (size_t k = 0; k < branches_b.size(); ++k) {
                if (b_used[k]) continue;
                const Branch& bb = branches_b[k];
                if (bb.top_id == b_top && bb.far_id == b_far) {
                    chosen = static_cast<int>(k);
                    rev_b = false;
                    break;
                }
                if (bb.top_id == b_far && bb.far_id == b_top) {
                    chosen = static_cast<int>(k);
                    rev_b = true;
                    break;
                }
            }
        } else {
            // The A branch ends at a terminal. Pick the unpaired
            // terminal-ended B branch at the matched junction whose far point
            // the GP maps closest to ours.
            if (!is_terminal(pruned_a, idx_a.at(ba.far_id))) continue;
            Point2 a_term_pos = node_pos(pruned_a.nodes[idx_a.at(ba.far_id)]);
            double best = std::numeric_limits<double>::max();
            for (size_t k = 0; k < branches_b.size(); ++k) {
                if (b_used[k]) continue;
                const Branch& bb = branches_b[k];
                int b_term;
                bool rev;
                if (bb.top_id == b_top && is_terminal(pruned_b, idx_b.at(bb.far_id))) {
                    b_term = bb.far_id;
                    rev = false;
                } else if (bb.far_id == b_top && is_terminal(pruned_b, idx_b.at(bb.top_id))) {
                    b_term = bb.top_id;
                    rev = true;
                } else {
                    continue;
                }
                Point2 b_term_pos = node_pos(pruned_b.nodes[idx_b.at(b_term)]);
                double d = (a_term_pos - predict(b_term_pos).mean).norm();
                if (d < best) {
                    best = d;
                    chosen = static_cast<int>(k);
                    rev_b = rev;
                }
            }
        }
        if (chosen < 0) continue;
        b_used[chosen] = 1;
        Branch bb = branches_b[chosen];
        if (rev_b) reverse_branch(pruned_b, idx_b, bb);
        if (bb.point_ids.empty()) continue;

        auto sample_a = evenly_subsample(ba.point_ids, params.max_edge_points);
        auto sample_b = evenly_subsample(bb.point_ids, params.max_edge_points);

        std::vector<Point2> pa, pb;
        std::vector<GPPrediction> pred_b;
        for (int id : sample_a) pa.push_back(node_pos(pruned_a.nodes[idx_a.at(id)]));
        for (int id : sample_b) {
            Point2 p = node_pos(pruned_b.nodes[idx_b.at(id)]);
            pb.push_back(p);
            pred_b.push_back(predict(p));
        }

        std::vector<std::vector<double>> cost(pa.size(), std::vector<double>(pb.size()));
        for (size_t i = 0; i < pa.size(); ++i)
            for (size_t j = 0; j < pb.size(); ++j) cost[i][j] = (pa[i] - pred_b[j].mean).norm();

        auto assignment = hungarian(cost);
        auto arc_b = arc_lengths(pruned_b, bb, idx_b);

        struct Accepted {
            int a_idx_in_branch;  // position of the A node in ba.point_ids
            int a_id, b_id;
            double b_arc;
        };
        std::vector<Accepted> accepted;
        std::unordered_map<int, int> a_pos;
        for (size_t i = 0; i < ba.point_ids.size(); ++i) a_pos[ba.point_ids[i]] = static_cast<int>(i);

        for (auto [i, j] : assignment) {
            double sigma = std::sqrt(pred_b[j].variance + params.gp.beta_inv);
            if (cost[i][j] > params.gate * sigma) continue;
            Accepted acc;
            acc.a_id = sample_a[i];
            acc.b_id = sample_b[j];
            acc.a_idx_in_branch = a_pos.at(acc.a_id);
            acc.b_arc = arc_b.at(acc.b_id);
            accepted.push_back(acc);
        }
        std::sort(accepted.begin(), accepted.end(),
                  [](const Accepted& l, const Accepted& r) { return l.a_idx_in_branch < r.a_idx_in_branch; });

        // Ordering diagnostic: inversions of B arc order against A order.
        for (size_t i = 0; i + 1 < accepted.size(); ++i)
            if (accepted[i + 1].b_arc < accepted[i].b_arc) ++total_crossings;

        for (const Accepted& acc : accepted) {
            Correspondence c;
            c.point_a = node_pos(pruned_a.nodes[idx_a.at(acc.a_id)]);
            c.point_b = node_pos(pruned_b.nodes[idx_b.at(acc.b_id)]);
            c.provenance = Provenance::dense;
            c.node_a = acc.a_id;
            c.node_b = acc.b_id;
            out.pairs.push_back(c);
            train_b.push_back(c.point_b);
            train_a.push_back(c.point_a);
        }

        // Interpolate B positions for subsampled-away A nodes bracketed by
        // accepted anchors, proportional to A arc length.
        if (ba.point_ids.size() > sample_a.size() && accepted.size() >= 2) {
            auto arc_a = arc_lengths(pruned_a, ba, idx_a);
            std::set<int> have;
            for (const Accepted& acc : accepted) have.insert(acc.a_id);
            for (size_t k = 0; k + 1 < accepted.size(); ++k) {
                const Accepted& lo = accepted[k];
                const Accepted& hi = accepted[k + 1];
                double sa0 = arc_a.at(lo.a_id), sa1 = arc_a.at(hi.a_id);
                if (sa1 <= sa0) continue;
                for (int p = lo.a_idx_in_branch + 1; p < hi.a_idx_in_branch; ++p) {
                    int a_id = ba.point_ids[p];
                    if (have.count(a_id)) continue;
                    double f = (arc_a.at(a_id) - sa0) / (sa1 - sa0);
                    double target = lo.b_arc + f * (hi.b_arc - lo.b_arc);
                    Correspondence c;
                    c.point_a = node_pos(pruned_a.nodes[idx_a.at(a_id)]);
                    c.point_b = point_at_arc(pruned_b, bb, idx_b, target);
                    c.provenance = Provenance::dense;
                    c.node_a = a_id;
                    c.node_b = -1;
                    out.pairs.push_back(c);
                }
            }
        }
    }

    if (total_crossings > 0)
        log::info("dense_match: " + std::to_string(total_crossings) +
                  " ordering crossing(s) along branches");
    return out;
}

std::string correspondences_write(const CorrespondenceSet& set, const std::string& header) {
    std::ostringstream out;
    if (!header.empty()) {
        std::istringstream lines(header);
        std::string line;
        while (std::getline(lines, line)) out << "# " << line << "\n";
    }
    char buf[160];
    for (const Correspondence& c : set.pairs) {
        std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g %.10g %s\n", c.point_a.x(), c.point_a.y(),
                      c.point_b.x(), c.point_b.y(),
                      c.provenance == Provenance::bifurcation ? "bifurcation" : "dense");
        out << buf;
    }
    return out.str();
}

CorrespondenceSet correspondences_read(const std::string& text) {
    CorrespondenceSet set;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line);
        Correspondence c;
        std::string prov;
        if (!(fields >> c.point_a.x() >> c.point_a.y() >> c.point_b.x() >> c.point_b.y() >> prov))
            throw ParseError("correspondences: expected 'xA yA xB yB provenance'", line_no);
        if (prov == "bifurcation")
            c.provenance = Provenance::bifurcation;
        else if (prov == "dense")
            c.provenance = Provenance::dense;
        else
            throw ParseError("correspondences: unknown provenance '" + prov + "'", line_no);
        set.pairs.push_back(c);
    }
    return set;
}

void correspondences_save(const CorrespondenceSet& set, const std::string& path,
                          const std::string& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << correspondences_write(set, header);
    if (!out) throw IoError("write failed: " + path);
}

CorrespondenceSet correspondences_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return correspondences_read(buf.str());
}

}  // namespace vrec
