#include "vrec/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "vrec/errors.hpp"
#include "vrec/log.hpp"

namespace vrec {

VesselTree build_tree_3d(const VesselTree& pruned_a, const CorrespondenceSet& correspondences,
                         const StereoGeometry& geometry) {
    geometry.validate();
    if (correspondences.empty()) throw MatchError("build_tree_3d: no correspondences");

    std::unordered_map<int, int> idx_a;
    for (size_t i = 0; i < pruned_a.nodes.size(); ++i)
        idx_a[pruned_a.nodes[i].id] = static_cast<int>(i);

    // World radius per pixel radius: mean singular value of M^-1.
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(geometry.intrinsics.topLeftCorner<2, 2>().inverse());
    const double px_to_world = svd.singularValues().mean();

    struct Lifted {
        int a_id;
        Point3D p;
        double radius;
    };
    std::unordered_map<int, Lifted> lifted;
    for (const Correspondence& c : correspondences.pairs) {
        if (c.node_a < 0) continue;
        auto it = idx_a.find(c.node_a);
        if (it == idx_a.end()) {
            log::warn("build_tree_3d: correspondence references unknown node " +
                      std::to_string(c.node_a));
            continue;
        }
        Point2 wa = to_world(geometry.intrinsics, c.point_a);
        Point2 wb = to_world(geometry.intrinsics, c.point_b);
        Lifted l;
        l.a_id = c.node_a;
        l.p = triangulate(geometry, wa, wb);
        double rscale = geometry.magnification_correction ? l.p.z / geometry.source_height : 1.0;
        l.radius = pruned_a.nodes[it->second].radius * px_to_world * rscale;
        lifted[c.node_a] = l;
    }
    if (lifted.empty()) throw MatchError("build_tree_3d: no correspondence maps to a tree node");

    // Walk A in id order, reparenting each matched node to its nearest
    // matched ancestor.
    std::unordered_map<int, int> nearest_matched_ancestor;  // a_id -> a_id or -1
    std::unordered_map<int, int> new_id;                    // a_id -> 3d id
    VesselTree out;
    out.dimensionality = 3;
    int fragments = 0;
    for (const VesselNode& n : pruned_a.nodes) {
        int anc = -1;
        if (n.parent_id != -1)
            anc = lifted.count(n.parent_id) ? n.parent_id : nearest_matched_ancestor[n.parent_id];
        nearest_matched_ancestor[n.id] = lifted.count(n.id) ? n.id : anc;
        if (!lifted.count(n.id)) continue;

        VesselNode m;
        m.id = static_cast<int>(out.nodes.size()) + 1;
        const Lifted& l = lifted.at(n.id);
        m.x = l.p.x;
        m.y = l.p.y;
        m.z = l.p.z;
        m.radius = l.radius;
        if (anc != -1) {
            m.parent_id = new_id.at(anc);
        } else if (out.nodes.empty()) {
            m.parent_id = -1;
        } else {
            // Matched fragment with no matched ancestor: attach to the
            // nearest already-placed node to keep a single root.
            ++fragments;
            double best = std::numeric_limits<double>::max();
            int best_id = 1;
            for (const VesselNode& q : out.nodes) {
                double d = std::hypot(q.x - l.p.x, q.y - l.p.y);
                if (d < best) {
                    best = d;
                    best_id = q.id;
                }
            }
            m.parent_id = best_id;
        }
        new_id[n.id] = m.id;
        out.nodes.push_back(m);
    }
    if (fragments > 0)
        log::warn("build_tree_3d: reattached " + std::to_string(fragments) +
                  " disconnected fragment(s)");
    out.reclassify();
    return out;
}

namespace {

struct BranchPath {
    std::vector<int> idx;  // node indexes along the branch, junction to junction
};

// Paths between consecutive junction nodes (terminal / bifurcation / root),
// including both endpoints.
std::vector<BranchPath> branch_paths(const VesselTree& t) {
    auto ch = t.children();
    std::vector<BranchPath> out;
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        bool junction = t.nodes[i].parent_id == -1 || ch[i].size() != 1;
        if (!junction) continue;
        for (int c : ch[i]) {
            BranchPath p;
            p.idx.push_back(static_cast<int>(i));
            int cur = c;
            while (ch[cur].size() == 1) {
                p.idx.push_back(cur);
                cur = ch[cur][0];
            }
            p.idx.push_back(cur);
            out.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace

VesselTree smooth_depth(const VesselTree& tree3d, double step) {
    if (step <= 0) throw ParameterError("smooth_depth: step must be > 0");
    if (tree3d.dimensionality != 3) throw ParameterError("smooth_depth: tree must be 3D");

    VesselTree out = tree3d;
    auto ch = out.children();
    auto paths = branch_paths(tree3d);

    for (const BranchPath& path : paths) {
        const size_t n = path.idx.size();
        // Lateral arc length; the z being smoothed must not warp the window.
        std::vector<double> arc(n, 0.0);
        for (size_t k = 1; k < n; ++k) {
            const VesselNode& a = tree3d.nodes[path.idx[k - 1]];
            const VesselNode& b = tree3d.nodes[path.idx[k]];
            arc[k] = arc[k - 1] + std::hypot(b.x - a.x, b.y - a.y);
        }
        const double half = step / 2 + 1e-9;
        for (size_t k = 0; k < n; ++k) {
            int i = path.idx[k];
            // Roots and bifurcations are shared between branches: keep depth.
            bool shared = tree3d.nodes[i].parent_id == -1 || ch[i].size() >= 2;
            if (shared) continue;
            double sum = 0.0;
            int cnt = 0;
            for (size_t m = 0; m < n; ++m) {
                if (std::abs(arc[m] - arc[k]) <= half) {
                    sum += tree3d.nodes[path.idx[m]].z;
                    ++cnt;
                }
            }
            out.nodes[i].z = sum / cnt;
        }
    }
    return out;
}

}  // namespace vrec
