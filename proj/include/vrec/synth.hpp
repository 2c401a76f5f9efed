#pragma once

#include <map>
#include <string>

#include "vrec/geometry.hpp"
#include "vrec/image.hpp"
#include "vrec/tree.hpp"

namespace vrec {

/// Parameters for one synthetic 3D vessel skeleton. depth counts branch
/// generations: a full binary layout has 2^depth - 1 branch segments and
/// 2^(depth-1) - 1 bifurcations, so depth 1 is a single straight branch.
/// corner_count sharp in-plane direction changes are injected at random
/// interior nodes. z is the height-gap depth below the source plane.
struct TreeSpec {
    uint64_t seed = 1;
    int depth = 3;
    double length_min = 60.0, length_max = 110.0;   // world units per branch
    double angle_min_deg = 20.0, angle_max_deg = 40.0;
    double radius_min = 5.0, radius_max = 9.0;
    double z_min = 480.0, z_max = 520.0;
    int corner_count = 0;
    double node_spacing = 2.0;  // arc distance between consecutive nodes

    void validate() const;
};

/// Deterministic per seed. Root at the origin, trunk along +y; every node z
/// stays inside [z_min, z_max] by construction.
VesselTree gen_tree(const TreeSpec& spec);

/// Perspective projection from the source at (source_x, 0, hx) onto the
/// detector plane, then intrinsics: x_det = source_x + (x - source_x) * hx/z
/// (same form in y from the source's y = 0). Radii scale by hx/z times the
/// mean pixel scale of M. Node z outside (0, hx] raises GeometryError.
VesselTree project(const StereoGeometry& g, double source_x, const VesselTree& tree3d);

/// Stereo projection with exact per-node ground truth. View A is the source
/// at -a, view B at +a.
struct ProjectedTree {
    VesselTree view_a;  // 2D pixel tree
    VesselTree view_b;
    struct NodeTruth {
        Point2 pixel_a, pixel_b;
        double depth;
    };
    std::map<int, NodeTruth> truth;  // keyed by node id, total over nodes
};
ProjectedTree project_stereo(const StereoGeometry& g, const VesselTree& tree3d);

enum class Clutter { none, bone_disk };

struct RenderParams {
    int canvas_width = 768;
    int canvas_height = 768;
    double vessel_intensity = 180.0;
    double background_intensity = 100.0;
    double noise_sigma = 3.0;
    uint64_t noise_seed = 7;
    Clutter clutter = Clutter::none;
    double bone_intensity = 150.0;  // kept below the vessels, see README notes
    double bone_center_x = -1.0;    // < 0: 0.45 * canvas
    double bone_center_y = -1.0;
    double bone_radius = -1.0;      // < 0: 0.18 * min(canvas)

    void validate() const;
};

/// Render a projected 2D tree as anti-aliased capsule strokes of the
/// projected radii over a flat background, optionally over a sharp-edged
/// bone disk, plus seeded additive Gaussian noise. Geometry outside the
/// canvas is clipped with a warning; an empty tree gives a flat noise image.
GrayImage rasterize(const VesselTree& ptree2d, const RenderParams& params);

}  // namespace vrec
