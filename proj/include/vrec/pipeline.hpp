#pragma once

#include "vrec/config.hpp"
#include "vrec/mesh.hpp"
#include "vrec/reconstruct.hpp"

namespace vrec {

/// Synthetic stage output: stereo image pair, the generating 3D tree, the
/// projected views and the exact correspondence table.
struct SynthOutput {
    GrayImage image_a, image_b;
    VesselTree gt_tree3d;
    ProjectedTree projected;
    CorrespondenceSet gt_correspondences;
};
SynthOutput run_synth(const PipelineConfig& config, const std::string& spec_name);

BinaryMask run_segment(const PipelineConfig& config, const GrayImage& raw,
                       LabelMap* labels_out = nullptr);

/// thin + trace + estimate_radii against the (pre-thinning) mask.
VesselTree run_trace(const PipelineConfig& config, const BinaryMask& mask);

/// Affine source per config: explicit matrix, correspondence file, or the
/// NCC translation estimate (which needs both images).
Affine2D resolve_affine(const PipelineConfig& config, const GrayImage* image_a,
                        const GrayImage* image_b);

struct MatchOutput {
    Affine2D affine;
    CorrespondenceSet correspondences;  // seed plus dense pairs
    VesselTree pruned_a, pruned_b;
};
MatchOutput run_match(const PipelineConfig& config, const VesselTree& tree_a,
                      const VesselTree& tree_b, const Affine2D& affine);

struct ReconOutput {
    VesselTree tree3d;  // depth-smoothed
    TriangleMesh mesh;
};
ReconOutput run_reconstruct(const PipelineConfig& config, const VesselTree& pruned_a,
                            const CorrespondenceSet& correspondences);

ErrorReport run_eval(const PipelineConfig& config, const VesselTree& recon,
                     const VesselTree& gt_tree3d);

struct PipelineOutput {
    BinaryMask mask_a, mask_b;
    VesselTree tree_a, tree_b;
    MatchOutput match;
    ReconOutput recon;
};
/// segment -> trace -> match -> reconstruct on a stereo pair.
PipelineOutput run_pipeline(const PipelineConfig& config, const GrayImage& image_a,
                            const GrayImage& image_b);

/// Atomic text write (temp file + rename).
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace vrec
