#include "vrec/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "vrec/log.hpp"

namespace vrec {

SynthOutput run_synth(const PipelineConfig& config, const std::string& spec_name) {
    auto it = config.tree_specs.find(spec_name);
    if (it == config.tree_specs.end())
        throw ParameterError("synth: unknown tree spec '" + spec_name + "'");

    SynthOutput out;
    out.gt_tree3d = gen_tree(it->second);
    out.projected = project_stereo(config.geometry, out.gt_tree3d);

    RenderParams render = config.render;
    out.image_a = rasterize(out.projected.view_a, render);
    render.noise_seed = config.render.noise_seed + 1;  // independent view noise
    out.image_b = rasterize(out.projected.view_b, render);

    for (const VesselNode& n : out.gt_tree3d.nodes) {
        const auto& t = out.projected.truth.at(n.id);
        Correspondence c;
        c.point_a = t.pixel_a;
        c.point_b = t.pixel_b;
        c.provenance =
            n.kind == NodeKind::bifurcation ? Provenance::bifurcation : Provenance::dense;
        c.node_a = n.id;
        c.node_b = n.id;
        out.gt_correspondences.pairs.push_back(c);
    }
    return out;
}

BinaryMask run_segment(const PipelineConfig& config, const GrayImage& raw, LabelMap* labels_out) {
    return segment_pipeline(raw, config.segmentation, labels_out);
}

VesselTree run_trace(const PipelineConfig& config, const BinaryMask& mask) {
    (void)config;
    BinaryMask skeleton = thin(mask);
    VesselTree tree = trace(skeleton);
    return estimate_radii(tree, mask);
}

Affine2D resolve_affine(const PipelineConfig& config, const GrayImage* image_a,
                        const GrayImage* image_b) {
    switch (config.matching.affine_mode) {
        case AffineMode::matrix:
            return Affine2D::from_row_major(config.matching.affine_matrix);
        case AffineMode::file: {
            auto pairs = load_point_pairs(config.matching.affine_file);
            AffineFit fit = estimate_affine(pairs);
            log::info("affine from file: residual rms " + std::to_string(fit.residual_rms));
            return fit.transform;
        }
        case AffineMode::auto_translation:
            if (!image_a || !image_b)
                throw ParameterError("affine mode 'auto' needs both images");
            return estimate_translation_ncc(*image_a, *image_b, config.matching.shift_range);
    }
    throw ParameterError("unreachable affine mode");
}

MatchOutput run_match(const PipelineConfig& config, const VesselTree& tree_a,
                      const VesselTree& tree_b, const Affine2D& affine) {
    MatchOutput out;
    out.affine = affine;
    BifurcationMatch initial = match_bifurcations(tree_a, tree_b, affine, config.matching.range_px);
    out.pruned_a = initial.pruned_a;
    out.pruned_b = initial.pruned_b;
    out.correspondences =
        dense_match(initial.pruned_a, initial.pruned_b, initial.seed, config.matching.dense);
    log::info("match: " + std::to_string(initial.seed.size()) + " bifurcation + " +
              std::to_string(out.correspondences.size() - initial.seed.size()) + " dense pairs");
    return out;
}

ReconOutput run_reconstruct(const PipelineConfig& config, const VesselTree& pruned_a,
                            const CorrespondenceSet& correspondences) {
    ReconOutput out;
    VesselTree raw3d = build_tree_3d(pruned_a, correspondences, config.geometry);
    out.tree3d = smooth_depth(raw3d, config.reconstruction.smooth_step);
    out.mesh = mesh_from_tree(out.tree3d, config.reconstruction.ring_segments);
    return out;
}

ErrorReport run_eval(const PipelineConfig& config, const VesselTree& recon,
                     const VesselTree& gt_tree3d) {
    auto points = tree_points(recon);
    auto gt = tree_points(gt_tree3d);
    auto pairs = associate(points, gt);
    return depth_error(points, gt, pairs, config.evaluation);
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(name) + ": " + e.what());
    }
}

}  // namespace

PipelineOutput run_pipeline(const PipelineConfig& config, const GrayImage& image_a,
                            const GrayImage& image_b) {
    PipelineOutput out;
    out.mask_a = stage("segment(A)", [&] { return run_segment(config, image_a); });
    out.mask_b = stage("segment(B)", [&] { return run_segment(config, image_b); });
    out.tree_a = stage("trace(A)", [&] { return run_trace(config, out.mask_a); });
    out.tree_b = stage("trace(B)", [&] { return run_trace(config, out.mask_b); });
    Affine2D affine = stage("affine", [&] { return resolve_affine(config, &image_a, &image_b); });
    out.match = stage("match", [&] { return run_match(config, out.tree_a, out.tree_b, affine); });
    out.recon = stage("reconstruct",
                      [&] { return run_reconstruct(config, out.match.pruned_a, out.match.correspondences); });
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot move " + tmp + " into place");
}

}  // namespace vrec
