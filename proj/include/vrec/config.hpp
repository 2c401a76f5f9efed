#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vrec/evaluate.hpp"
#include "vrec/geometry.hpp"
#include "vrec/matching.hpp"
#include "vrec/segment.hpp"
#include "vrec/synth.hpp"

namespace vrec {

enum class AffineMode { auto_translation, matrix, file };

struct MatchingConfig {
    AffineMode affine_mode = AffineMode::auto_translation;
    int shift_range = 160;               // NCC search range for auto mode
    std::array<double, 9> affine_matrix{1, 0, 0, 0, 1, 0, 0, 0, 1};
    std::string affine_file;             // point pairs for estimate_affine
    double range_px = 20.0;              // bifurcation match radius r
    DenseMatchParams dense;
};

struct ReconstructionConfig {
    double smooth_step = 10.0;
    int ring_segments = 12;
};

/// Every free parameter of the pipeline in one place. Defaults follow the
/// values documented in the README table.
struct PipelineConfig {
    uint64_t seed = 1;
    StereoGeometry geometry;
    SegmentConfig segmentation;
    MatchingConfig matching;
    ReconstructionConfig reconstruction;
    EvalParams evaluation;
    RenderParams render;
    std::map<std::string, TreeSpec> tree_specs;  // shipped synthetic shapes
};

/// Built-in defaults, including the four shipped tree specs
/// (fork, comb, zigzag-corner, wide-angle).
PipelineConfig default_config();

/// Parse from JSON text; unknown keys are rejected by name. Values not
/// present keep their defaults. Throws ParseError / ParameterError.
PipelineConfig config_from_json_text(const std::string& text);
PipelineConfig load_config(const std::string& path);

/// Canonical JSON serialization (sorted keys).
std::string config_to_json_text(const PipelineConfig& config);

/// All invariant violations, aggregated; empty means valid.
std::vector<std::string> validate_config(const PipelineConfig& config);

/// FNV-1a over the canonical serialization; embedded in every output.
uint64_t config_hash(const PipelineConfig& config);
std::string config_hash_hex(const PipelineConfig& config);

}  // namespace vrec
