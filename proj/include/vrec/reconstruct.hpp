#pragma once

#include "vrec/geometry.hpp"
#include "vrec/matching.hpp"
#include "vrec/tree.hpp"

namespace vrec {

/// Lift matched nodes of the pruned A tree into 3D: both endpoints of each
/// correspondence go through M^-1 and are triangulated; topology follows A
/// with every node reparented to its nearest matched ancestor. Disconnected
/// matched fragments are attached to the closest already-placed node (with a
/// warning). Pixel radii are converted with the mean scale of M^-1 (times
/// z/hx under magnification correction).
VesselTree build_tree_3d(const VesselTree& pruned_a, const CorrespondenceSet& correspondences,
                         const StereoGeometry& geometry);

/// Per-branch box smoothing: each node's z becomes the mean z of branch nodes
/// within +-step/2 of lateral (x, y) arc length. Roots and bifurcations are
/// shared between branches and keep their z; x, y, radii and topology are
/// untouched.
VesselTree smooth_depth(const VesselTree& tree3d, double step);

}  // namespace vrec
