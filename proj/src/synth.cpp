#include "vrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "vrec/errors.hpp"
#include "vrec/log.hpp"

namespace vrec {

namespace {

constexpr double kPi = 3.141592653589793;

inline double next_uniform(std::mt19937_64& rng) {
    return (rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline double sample_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * next_uniform(rng);
}

// Seeded Box-Muller; <random> distributions are not bit-stable across
// standard libraries.
class GaussianSource {
public:
    explicit GaussianSource(uint64_t seed) : rng_(seed) {}
    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = std::max(next_uniform(rng_), 1e-300);
        double u2 = next_uniform(rng_);
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_ = false;
};

}  // namespace

void TreeSpec::validate() const {
    if (depth < 1 || depth > 8) throw ParameterError("tree spec: depth must be in [1,8]");
    if (!(length_min > 0 && length_max >= length_min))
        throw ParameterError("tree spec: bad branch length range");
    if (!(angle_min_deg >= 0 && angle_max_deg >= angle_min_deg && angle_max_deg <= 90))
        throw ParameterError("tree spec: bad branch angle range");
    if (!(radius_min > 0 && radius_max >= radius_min))
        throw ParameterError("tree spec: bad radius range");
    if (!(z_min > 0 && z_max > z_min)) throw ParameterError("tree spec: bad z range");
    if (corner_count < 0) throw ParameterError("tree spec: corner_count must be >= 0");
    if (!(node_spacing > 0)) throw ParameterError("tree spec: node_spacing must be > 0");
}

VesselTree gen_tree(const TreeSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    const int total_branches = (1 << spec.depth) - 1;
    // Pre-assign the sharp corners to branch slots so the RNG stream stays
    // aligned regardless of recursion order.
    std::vector<int> corners_per_branch(total_branches, 0);
    for (int c = 0; c < spec.corner_count; ++c)
        ++corners_per_branch[static_cast<int>(next_uniform(rng) * total_branches) % total_branches];

    VesselTree tree;
    tree.dimensionality = 3;

    struct Tip {
        int node_id;       // attachment node
        double x, y, z;
        double heading;    // planar angle from +y
        int level;
        int branch_index;  // heap order: trunk 0, children 2i+1 / 2i+2
    };

    // Root node.
    {
        VesselNode root;
        root.id = 1;
        root.parent_id = -1;
        root.x = 0;
        root.y = 0;
        root.z = sample_range(rng, spec.z_min, spec.z_max);
        root.radius = sample_range(rng, spec.radius_min, spec.radius_max);
        tree.nodes.push_back(root);
    }

    std::vector<Tip> stack{{1, 0.0, 0.0, tree.nodes[0].z, 0.0, 1, 0}};
    while (!stack.empty()) {
        Tip tip = stack.back();
        stack.pop_back();

        const double length = sample_range(rng, spec.length_min, spec.length_max);
        const double radius = sample_range(rng, spec.radius_min, spec.radius_max);
        const double target_z = sample_range(rng, spec.z_min, spec.z_max);
        const int steps = std::max(2, static_cast<int>(std::lround(length / spec.node_spacing)));

        int corner_at = -1;
        double corner_turn = 0.0;
        if (corners_per_branch[tip.branch_index] > 0 && steps > 3) {
            corner_at = 1 + static_cast<int>(next_uniform(rng) * (steps - 2));
            double mag = sample_range(rng, 50.0, 80.0) * kPi / 180.0;
            corner_turn = next_uniform(rng) < 0.5 ? mag : -mag;
        }

        double heading = tip.heading;
        double x = tip.x, y = tip.y, z = tip.z;
        int parent = tip.node_id;
        const double dz = (target_z - z) / steps;
        const double step_len = length / steps;
        for (int s = 1; s <= steps; ++s) {
            if (s == corner_at) heading += corner_turn;
            x += step_len * std::sin(heading);
            y += step_len * std::cos(heading);
            z += dz;
            VesselNode n;
            n.id = static_cast<int>(tree.nodes.size()) + 1;
            n.parent_id = parent;
            n.x = x;
            n.y = y;
            n.z = std::clamp(z, spec.z_min, spec.z_max);
            n.radius = radius;
            tree.nodes.push_back(n);
            parent = n.id;
        }

        if (tip.level < spec.depth) {
            const double spread_l = sample_range(rng, spec.angle_min_deg, spec.angle_max_deg);
            const double spread_r = sample_range(rng, spec.angle_min_deg, spec.angle_max_deg);
            // Push right first so the left child is generated first (stack).
            stack.push_back({parent, x, y, z, heading + spread_r * kPi / 180.0, tip.level + 1,
                             2 * tip.branch_index + 2});
            stack.push_back({parent, x, y, z, heading - spread_l * kPi / 180.0, tip.level + 1,
                             2 * tip.branch_index + 1});
        }
    }
    tree.reclassify();
    tree.validate();
    return tree;
}

VesselTree project(const StereoGeometry& g, double source_x, const VesselTree& tree3d) {
    g.validate();
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(g.intrinsics.topLeftCorner<2, 2>());
    const double px_scale = svd.singularValues().mean();

    VesselTree out;
    out.dimensionality = 2;
    out.nodes.reserve(tree3d.nodes.size());
    for (const VesselNode& n : tree3d.nodes) {
        if (!(n.z > 0 && n.z <= g.source_height))
            throw GeometryError("project: node depth " + std::to_string(n.z) +
                                " outside (0, hx]");
        const double mag = g.source_height / n.z;
        const double x_det = source_x + (n.x - source_x) * mag;
        const double y_det = n.y * mag;
        Eigen::Vector3d px = g.intrinsics * Eigen::Vector3d(x_det, y_det, 1.0);
        VesselNode m = n;
        m.x = px.x() / px.z();
        m.y = px.y() / px.z();
        m.z = 0;
        m.radius = n.radius * mag * px_scale;
        out.nodes.push_back(m);
    }
    return out;
}

ProjectedTree project_stereo(const StereoGeometry& g, const VesselTree& tree3d) {
    ProjectedTree out;
    out.view_a = project(g, -g.half_baseline, tree3d);
    out.view_b = project(g, +g.half_baseline, tree3d);
    for (size_t i = 0; i < tree3d.nodes.size(); ++i) {
        ProjectedTree::NodeTruth t;
        t.pixel_a = {out.view_a.nodes[i].x, out.view_a.nodes[i].y};
        t.pixel_b = {out.view_b.nodes[i].x, out.view_b.nodes[i].y};
        t.depth = tree3d.nodes[i].z;
        out.truth[tree3d.nodes[i].id] = t;
    }
    return out;
}

void RenderParams::validate() const {
    if (canvas_width < 8 || canvas_height < 8) throw ParameterError("render: canvas too small");
    if (noise_sigma < 0) throw ParameterError("render: noise sigma must be >= 0");
    for (double v : {vessel_intensity, background_intensity, bone_intensity})
        if (v < 0 || v > 255) throw ParameterError("render: intensities must be in [0,255]");
}

GrayImage rasterize(const VesselTree& ptree2d, const RenderParams& params) {
    params.validate();
    const int w = params.canvas_width, h = params.canvas_height;
    std::vector<double> canvas(static_cast<size_t>(w) * h, params.background_intensity);

    if (params.clutter == Clutter::bone_disk) {
        const double cx = params.bone_center_x >= 0 ? params.bone_center_x : 0.45 * w;
        const double cy = params.bone_center_y >= 0 ? params.bone_center_y : 0.45 * h;
        const double r = params.bone_radius >= 0 ? params.bone_radius : 0.18 * std::min(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                    canvas[static_cast<size_t>(y) * w + x] = params.bone_intensity;
    }

    std::unordered_map<int, int> idx;
    for (size_t i = 0; i < ptree2d.nodes.size(); ++i) idx[ptree2d.nodes[i].id] = static_cast<int>(i);

    bool clipped = false;
    for (const VesselNode& n : ptree2d.nodes) {
        if (n.parent_id == -1) continue;
        const VesselNode& p = ptree2d.nodes[idx.at(n.parent_id)];
        const double r0 = p.radius, r1 = n.radius;
        const double rmax = std::max(r0, r1);
        int x0 = static_cast<int>(std::floor(std::min(p.x, n.x) - rmax - 1));
        int y0 = static_cast<int>(std::floor(std::min(p.y, n.y) - rmax - 1));
        int x1 = static_cast<int>(std::ceil(std::max(p.x, n.x) + rmax + 1));
        int y1 = static_cast<int>(std::ceil(std::max(p.y, n.y) + rmax + 1));
        if (x0 < 0 || y0 < 0 || x1 >= w || y1 >= h) clipped = true;
        x0 = std::max(x0, 0);
        y0 = std::max(y0, 0);
        x1 = std::min(x1, w - 1);
        y1 = std::min(y1, h - 1);

        const double ex = n.x - p.x, ey = n.y - p.y;
        const double len2 = ex * ex + ey * ey;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                double t = len2 > 0 ? ((x - p.x) * ex + (y - p.y) * ey) / len2 : 0.0;
                t = std::clamp(t, 0.0, 1.0);
                const double qx = p.x + t * ex, qy = p.y + t * ey;
                const double dist = std::hypot(x - qx, y - qy);
                const double radius = r0 + t * (r1 - r0);
                // 1 px anti-aliased capsule edge.
                const double cover = std::clamp(radius + 0.5 - dist, 0.0, 1.0);
                if (cover > 0) {
                    double& px = canvas[static_cast<size_t>(y) * w + x];
                    px = px + cover * (params.vessel_intensity - px);
                }
            }
        }
    }
    if (clipped) log::warn("rasterize: tree extends outside the canvas, strokes clipped");

    GrayImage img(w, h, 8);
    GaussianSource noise(params.noise_seed);
    for (size_t i = 0; i < canvas.size(); ++i) {
        double v = canvas[i];
        if (params.noise_sigma > 0) v += params.noise_sigma * noise.next();
        img.data()[i] = static_cast<uint16_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
    return img;
}

}  // namespace vrec
