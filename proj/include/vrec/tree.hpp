#pragma once

#include <array>
#include <string>
#include <vector>

#include "vrec/image.hpp"

namespace vrec {

enum class NodeKind { terminal, edge, bifurcation };

/// One centerline sample. Positions are pixels for 2D trees and world units
/// for 3D trees; radius shares the position units.
struct VesselNode {
    int id = 0;           // >= 1, SWC style
    NodeKind kind = NodeKind::edge;
    double x = 0, y = 0, z = 0;
    double radius = 0;
    int parent_id = -1;   // -1 for the root; always < id
};

/// Rooted acyclic centerline tree in SWC topological order (parents precede
/// children). Node kinds follow child counts: terminals have none (the root
/// keeps terminal kind with a single child), edge nodes exactly one,
/// bifurcations two or more.
struct VesselTree {
    std::vector<VesselNode> nodes;
    int dimensionality = 2;  // 2 or 3

    bool empty() const { return nodes.empty(); }
    size_t size() const { return nodes.size(); }

    /// Index into nodes for a node id, or -1.
    int index_of(int id) const;
    /// Children indexes per node index.
    std::vector<std::vector<int>> children() const;
    /// Throws ParameterError if any structural invariant is violated.
    void validate() const;
    /// Recompute node kinds from child counts (root exemption included).
    void reclassify();
};

/// Thin a mask to an 8-connected, one-pixel-wide skeleton by iterative
/// boundary peeling: per iteration, two sequential subpasses (north/east then
/// south/west boundaries) delete pixels that are 8-simple and not endpoints,
/// so connected components are preserved and the result is a fixed point.
BinaryMask thin(const BinaryMask& mask);

/// Yokoi connectivity number for 8-connected foreground; 1 means the pixel is
/// simple (deletable without changing local topology). Exposed for tests.
int yokoi_number(const BinaryMask& mask, int x, int y);

/// Parse a 1-px-wide skeleton into a tree, one node per skeleton pixel.
/// Degree 1 pixels are terminals, 2 edges, >= 3 bifurcations. The root is the
/// terminal with the smallest (y, x); cycles are broken by dropping the edges
/// where breadth-first fronts meet (the cycle edge furthest from the root).
/// Multiple components: traces the largest and warns. Empty skeleton throws.
/// cycle_edges_removed, if given, receives the number of dropped edges.
VesselTree trace(const BinaryMask& skeleton, int* cycle_edges_removed = nullptr);

/// Estimate per-node radii by marching along +/- normal directions (tangent
/// from central differences, one-sided at branch ends) in 0.25 px steps with
/// bilinear mask sampling. The radius is the mean of the two 0.5-level
/// crossing distances minus half a pixel, floored at 0.5 px for nodes inside
/// the mask; nodes outside the mask get radius 0 with a warning.
VesselTree estimate_radii(const VesselTree& tree, const BinaryMask& mask);

}  // namespace vrec
