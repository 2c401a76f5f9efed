#include "vrec/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "vrec/log.hpp"

namespace vrec {

int VesselTree::index_of(int id) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    return -1;
}

std::vector<std::vector<int>> VesselTree::children() const {
    std::unordered_map<int, int> idx;
    idx.reserve(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) idx[nodes[i].id] = static_cast<int>(i);
    std::vector<std::vector<int>> ch(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].parent_id < 0) continue;
        auto it = idx.find(nodes[i].parent_id);
        if (it != idx.end()) ch[it->second].push_back(static_cast<int>(i));
    }
    return ch;
}

void VesselTree::validate() const {
    if (nodes.empty()) throw ParameterError("tree: empty");
    if (dimensionality != 2 && dimensionality != 3)
        throw ParameterError("tree: dimensionality must be 2 or 3");
    int roots = 0;
    std::unordered_map<int, size_t> seen;
    for (size_t i = 0; i < nodes.size(); ++i) {
        const VesselNode& n = nodes[i];
        if (n.id < 1) throw ParameterError("tree: node id must be >= 1");
        if (seen.count(n.id)) throw ParameterError("tree: duplicate node id " + std::to_string(n.id));
        seen[n.id] = i;
        if (n.parent_id == -1) {
            ++roots;
        } else {
            if (n.parent_id >= n.id)
                throw ParameterError("tree: parent id must precede node id " + std::to_string(n.id));
            if (!seen.count(n.parent_id))
                throw ParameterError("tree: unknown parent " + std::to_string(n.parent_id));
        }
        if (n.radius < 0) throw ParameterError("tree: negative radius at node " + std::to_string(n.id));
    }
    if (roots != 1) throw ParameterError("tree: expected exactly one root, found " + std::to_string(roots));

    auto ch = children();
    for (size_t i = 0; i < nodes.size(); ++i) {
        size_t c = ch[i].size();
        bool is_root = nodes[i].parent_id == -1;
        switch (nodes[i].kind) {
            case NodeKind::terminal:
                if (!(c == 0 || (is_root && c == 1)))
                    throw ParameterError("tree: terminal node " + std::to_string(nodes[i].id) +
                                         " has children");
                break;
            case NodeKind::edge:
                if (c != 1)
                    throw ParameterError("tree: edge node " + std::to_string(nodes[i].id) +
                                         " must have exactly one child");
                break;
            case NodeKind::bifurcation:
                if (c < 2)
                    throw ParameterError("tree: bifurcation node " + std::to_string(nodes[i].id) +
                                         " must have >= 2 children");
                break;
        }
    }
}

void VesselTree::reclassify() {
    auto ch = children();
    for (size_t i = 0; i < nodes.size(); ++i) {
        size_t c = ch[i].size();
        bool is_root = nodes[i].parent_id == -1;
        if (c >= 2)
            nodes[i].kind = NodeKind::bifurcation;
        else if (c == 0 || (is_root && c == 1))
            nodes[i].kind = NodeKind::terminal;
        else
            nodes[i].kind = NodeKind::edge;
    }
}

namespace {

// Neighbor order E, NE, N, NW, W, SW, S, SE as used by the Yokoi number.
constexpr int kNx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kNy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

inline bool fg(const BinaryMask& m, int x, int y) {
    return m.in_bounds(x, y) && m.at(x, y);
}

}  // namespace

int yokoi_number(const BinaryMask& mask, int x, int y) {
    int n[8];
    for (int k = 0; k < 8; ++k) n[k] = fg(mask, x + kNx[k], y + kNy[k]) ? 1 : 0;
    int c = 0;
    for (int k = 0; k < 8; k += 2) {
        int a = 1 - n[k];
        int b = 1 - n[(k + 1) % 8];
        int d = 1 - n[(k + 2) % 8];
        c += a - a * b * d;
    }
    return c;
}

BinaryMask thin(const BinaryMask& mask) {
    BinaryMask skel = mask;
    const int w = skel.width(), h = skel.height();
    auto degree = [&](int x, int y) {
        int d = 0;
        for (int k = 0; k < 8; ++k) d += fg(skel, x + kNx[k], y + kNy[k]) ? 1 : 0;
        return d;
    };

    // Directional boundary peeling: per subpass, candidates are the pixels
    // open to one compass direction, frozen before any deletion so each pass
    // removes exactly one boundary layer. Deletions are sequential and only
    // simple non-endpoint pixels go, so topology is preserved.
    static const int bx[4] = {0, 0, 1, -1};
    static const int by[4] = {-1, 1, 0, 0};  // N, S, E, W
    std::vector<size_t> candidates;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int dir = 0; dir < 4; ++dir) {
            candidates.clear();
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    if (skel.at(x, y) && !fg(skel, x + bx[dir], y + by[dir]))
                        candidates.push_back(static_cast<size_t>(y) * w + x);
            for (size_t p : candidates) {
                int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
                if (!skel.at(x, y)) continue;
                if (degree(x, y) < 2) continue;  // endpoints and isolated pixels stay
                if (yokoi_number(skel, x, y) != 1) continue;
                skel.set(x, y, false);
                changed = true;
            }
        }
    }
    return skel;
}

VesselTree trace(const BinaryMask& skeleton, int* cycle_edges_removed) {
    if (cycle_edges_removed) *cycle_edges_removed = 0;
    const int w = skeleton.width(), h = skeleton.height();
    std::vector<size_t> pixels;
    for (size_t i = 0; i < skeleton.size(); ++i)
        if (skeleton.data()[i]) pixels.push_back(i);
    if (pixels.empty()) throw ParameterError("trace: empty skeleton");

    // Restrict to the largest component if there are several.
    std::vector<int32_t> comp(skeleton.size(), -1);
    int ncomp = 0;
    std::vector<size_t> best;
    {
        std::vector<size_t> stack, cur;
        for (size_t seed : pixels) {
            if (comp[seed] >= 0) continue;
            cur.clear();
            stack.assign(1, seed);
            comp[seed] = ncomp;
            while (!stack.empty()) {
                size_t p = stack.back();
                stack.pop_back();
                cur.push_back(p);
                int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
                for (int k = 0; k < 8; ++k) {
                    int qx = px + kNx[k], qy = py + kNy[k];
                    if (!fg(skeleton, qx, qy)) continue;
                    size_t q = static_cast<size_t>(qy) * w + qx;
                    if (comp[q] < 0) {
                        comp[q] = ncomp;
                        stack.push_back(q);
                    }
                }
            }
            if (cur.size() > best.size()) best = cur;
            ++ncomp;
        }
    }
    if (ncomp > 1)
        log::warn("trace: skeleton has " + std::to_string(ncomp) +
                  " components, tracing the largest (" + std::to_string(best.size()) + " px)");

    std::vector<uint8_t> in_comp(skeleton.size(), 0);
    for (size_t p : best) in_comp[p] = 1;
    auto on = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && in_comp[static_cast<size_t>(y) * w + x];
    };
    // Skeleton graph adjacency: orthogonal neighbors always; a diagonal link
    // is redundant (and dropped) when either shared orthogonal neighbor is
    // set, which keeps junction degrees meaningful on dense crossings.
    auto linked = [&](int x, int y, int dx, int dy) {
        if (!on(x + dx, y + dy)) return false;
        if (dx == 0 || dy == 0) return true;
        return !on(x + dx, y) && !on(x, y + dy);
    };
    auto deg8 = [&](int x, int y) {
        int d = 0;
        for (int k = 0; k < 8; ++k) d += linked(x, y, kNx[k], kNy[k]) ? 1 : 0;
        return d;
    };

    // Root: terminal (degree-1) pixel with smallest (y, x); for pure cycles
    // fall back to the smallest pixel overall.
    size_t root = skeleton.size();
    for (size_t p : best) {
        int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
        if (deg8(px, py) == 1 && (root == skeleton.size() || p < root)) root = p;
    }
    if (root == skeleton.size()) {
        root = *std::min_element(best.begin(), best.end());
        log::warn("trace: no terminal pixel (cyclic skeleton), rooting at smallest pixel");
    }

    // BFS spanning tree; edges closing a cycle are dropped where fronts meet,
    // i.e. as far from the root as the cycle allows.
    std::vector<int32_t> order(skeleton.size(), -1);  // BFS id per pixel, 1-based
    std::vector<int32_t> parent_of(best.size() + 1, -1);
    VesselTree tree;
    tree.dimensionality = 2;
    tree.nodes.reserve(best.size());
    std::deque<size_t> queue;
    queue.push_back(root);
    order[root] = 1;
    parent_of[1] = -1;
    int next_id = 2;
    int dropped = 0;
    // Deterministic neighbor scan: N, NE, E, SE, S, SW, W, NW by (dy, dx).
    static const int sx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    static const int sy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    while (!queue.empty()) {
        size_t p = queue.front();
        queue.pop_front();
        int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
        for (int k = 0; k < 8; ++k) {
            int qx = px + sx[k], qy = py + sy[k];
            if (!linked(px, py, sx[k], sy[k])) continue;
            size_t q = static_cast<size_t>(qy) * w + qx;
            if (order[q] < 0) {
                order[q] = next_id;
                parent_of[next_id] = order[p];
                ++next_id;
                queue.push_back(q);
            }
        }
    }
    // Dropped cycle edges: edges in component = sum(deg)/2, tree edges = n-1.
    {
        size_t deg_sum = 0;
        for (size_t p : best) deg_sum += deg8(static_cast<int>(p % w), static_cast<int>(p / w));
        dropped = static_cast<int>(deg_sum / 2 - (best.size() - 1));
    }
    if (dropped > 0) {
        log::warn("trace: dropped " + std::to_string(dropped) + " cycle edge(s)");
        if (cycle_edges_removed) *cycle_edges_removed = dropped;
    }

    tree.nodes.resize(best.size());
    for (size_t p : best) {
        int id = order[p];
        VesselNode& n = tree.nodes[id - 1];
        n.id = id;
        n.parent_id = parent_of[id];
        n.x = static_cast<double>(p % w);
        n.y = static_cast<double>(p / w);
        n.z = 0;
        n.radius = 0;
    }
    tree.reclassify();
    return tree;
}

namespace {

// Bilinear sample of the mask as a 0/1 field; outside the canvas is 0.
double sample_mask(const BinaryMask& m, double x, double y) {
    int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    double fx = x - x0, fy = y - y0;
    auto v = [&](int xi, int yi) { return fg(m, xi, yi) ? 1.0 : 0.0; };
    return (1 - fy) * ((1 - fx) * v(x0, y0) + fx * v(x0 + 1, y0)) +
           fy * ((1 - fx) * v(x0, y0 + 1) + fx * v(x0 + 1, y0 + 1));
}

// Distance to the 0.5-level crossing along (dx, dy), by 0.25 px marching with
// linear refinement between the last inside and first outside samples.
double march_to_border(const BinaryMask& m, double x, double y, double dx, double dy) {
    const double step = 0.25;
    const double tmax = std::max(m.width(), m.height()) * 1.5;
    double t_prev = 0.0, v_prev = sample_mask(m, x, y);
    for (double t = step; t < tmax; t += step) {
        double v = sample_mask(m, x + dx * t, y + dy * t);
        if (v < 0.5) {
            if (v_prev <= v) return t;
            double f = (v_prev - 0.5) / (v_prev - v);
            return t_prev + f * (t - t_prev);
        }
        t_prev = t;
        v_prev = v;
    }
    return tmax;
}

}  // namespace

VesselTree estimate_radii(const VesselTree& tree, const BinaryMask& mask) {
    VesselTree out = tree;
    auto ch = out.children();
    std::unordered_map<int, int> idx;
    for (size_t i = 0; i < out.nodes.size(); ++i) idx[out.nodes[i].id] = static_cast<int>(i);

    int outside = 0;
    for (size_t i = 0; i < out.nodes.size(); ++i) {
        VesselNode& n = out.nodes[i];
        int xi = static_cast<int>(std::lround(n.x));
        int yi = static_cast<int>(std::lround(n.y));
        if (!fg(mask, xi, yi)) {
            n.radius = 0;
            ++outside;
            continue;
        }
        // Tangent from neighbor node positions: central difference where both
        // a parent and a child exist, one-sided at chain ends.
        const VesselNode* prev = nullptr;
        const VesselNode* next = nullptr;
        if (n.parent_id >= 0) prev = &out.nodes[idx[n.parent_id]];
        if (!ch[i].empty()) next = &out.nodes[ch[i][0]];
        double tx, ty;
        if (prev && next) {
            tx = next->x - prev->x;
            ty = next->y - prev->y;
        } else if (next) {
            tx = next->x - n.x;
            ty = next->y - n.y;
        } else if (prev) {
            tx = n.x - prev->x;
            ty = n.y - prev->y;
        } else {
            tx = 1;
            ty = 0;  // isolated node: arbitrary fixed direction
        }
        double len = std::hypot(tx, ty);
        if (len < 1e-12) {
            tx = 1;
            ty = 0;
            len = 1;
        }
        double nx = -ty / len, ny = tx / len;
        double d1 = march_to_border(mask, n.x, n.y, nx, ny);
        double d2 = march_to_border(mask, n.x, n.y, -nx, -ny);
        n.radius = std::max(0.5, 0.5 * (d1 + d2) - 0.5);
    }
    if (outside > 0)
        log::warn("estimate_radii: " + std::to_string(outside) +
                  " node(s) outside mask, radius set to 0");
    return out;
}

}  // namespace vrec
