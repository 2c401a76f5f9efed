#pragma once

#include <string>
#include <vector>

#include "vrec/affine.hpp"
#include "vrec/gp.hpp"
#include "vrec/tree.hpp"

namespace vrec {

enum class Provenance { bifurcation, dense };

/// One matched point pair across the stereo views. node_a / node_b reference
/// node ids of the (pruned) trees; node_b is -1 for pairs whose B position
/// was interpolated along a branch rather than snapped to a node.
struct Correspondence {
    Point2 point_a;
    Point2 point_b;
    Provenance provenance = Provenance::dense;
    int node_a = -1;
    int node_b = -1;
};

struct CorrespondenceSet {
    std::vector<Correspondence> pairs;

    size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

struct BifurcationMatch {
    CorrespondenceSet seed;   // one pair per matched bifurcation
    VesselTree pruned_a;      // ids renumbered after pruning
    VesselTree pruned_b;
};

/// Initial matching: each bifurcation of A is affine-predicted into B and
/// paired with the nearest unmatched B bifurcation within range_px, greedily
/// in ascending distance order so every bifurcation matches at most once.
/// Unmatched bifurcations in either tree lose their child-side branches that
/// end in a terminal (root-side trunks are never pruned). Throws MatchError
/// when nothing matches.
BifurcationMatch match_bifurcations(const VesselTree& tree_a, const VesselTree& tree_b,
                                    const Affine2D& affine, double range_px);

struct DenseMatchParams {
    GPHyperparams gp;
    double gate = 3.0;        // accept when cost <= gate * sqrt(var + beta_inv)
    int max_edge_points = 64; // cost-matrix cap per branch; rest interpolated
};

/// Dense matching: for every pair of branches joined by matched bifurcations,
/// fit a GP on the current correspondence set (inputs B, outputs A), build
/// the cost matrix ||pointA - mean(pointB)||, solve the assignment, keep
/// pairs passing the variance gate and append them before the next branch.
/// Branch pairs are processed in deterministic tree order. Skipped
/// (subsampled-away) A nodes receive arc-length-interpolated B positions.
/// The result contains the seed and is injective on both sides.
CorrespondenceSet dense_match(const VesselTree& pruned_a, const VesselTree& pruned_b,
                              const CorrespondenceSet& seed, const DenseMatchParams& params);

/// Text serialization: "xA yA xB yB provenance" rows, '#' comments.
std::string correspondences_write(const CorrespondenceSet& set, const std::string& header = "");
CorrespondenceSet correspondences_read(const std::string& text);
void correspondences_save(const CorrespondenceSet& set, const std::string& path,
                          const std::string& header = "");
CorrespondenceSet correspondences_load(const std::string& path);

}  // namespace vrec
