#include "vrec/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vrec/errors.hpp"

namespace vrec {

using nlohmann::json;

PipelineConfig default_config() {
    PipelineConfig c;
    c.geometry.source_height = 1000.0;
    c.geometry.half_baseline = 50.0;
    c.geometry.intrinsics << 1, 0, 384, 0, 1, 60, 0, 0, 1;

    TreeSpec fork;
    fork.seed = 11;
    fork.depth = 2;
    fork.length_min = 90;
    fork.length_max = 140;
    fork.angle_min_deg = 25;
    fork.angle_max_deg = 40;
    c.tree_specs["fork"] = fork;

    TreeSpec comb;
    comb.seed = 23;
    comb.depth = 3;
    comb.length_min = 55;
    comb.length_max = 95;
    comb.angle_min_deg = 15;
    comb.angle_max_deg = 35;
    c.tree_specs["comb"] = comb;

    TreeSpec zig;
    zig.seed = 37;
    zig.depth = 2;
    zig.length_min = 90;
    zig.length_max = 140;
    zig.angle_min_deg = 20;
    zig.angle_max_deg = 35;
    zig.corner_count = 3;
    c.tree_specs["zigzag-corner"] = zig;

    TreeSpec wide;
    wide.seed = 51;
    wide.depth = 2;
    wide.length_min = 80;
    wide.length_max = 120;
    wide.angle_min_deg = 55;
    wide.angle_max_deg = 80;
    wide.corner_count = 1;
    c.tree_specs["wide-angle"] = wide;
    return c;
}

namespace {

void reject_unknown(const json& obj, const std::vector<std::string>& known,
                    const std::string& scope) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ParseError("config: unknown key '" + scope + it.key() + "'");
    }
}

template <typename T>
void get_to_if(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) obj.at(key).get_to(out);
}

void parse_geometry(const json& j, StereoGeometry& g) {
    reject_unknown(j, {"hx", "a", "intrinsics", "magnification_correction", "disparity_x_only",
                       "eq5_minus_one"},
                   "geometry.");
    get_to_if(j, "hx", g.source_height);
    get_to_if(j, "a", g.half_baseline);
    if (j.contains("intrinsics")) {
        auto v = j.at("intrinsics").get<std::vector<double>>();
        if (v.size() != 9) throw ParseError("config: geometry.intrinsics must have 9 numbers");
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) g.intrinsics(r, c) = v[r * 3 + c];
    }
    get_to_if(j, "magnification_correction", g.magnification_correction);
    get_to_if(j, "disparity_x_only", g.disparity_x_only);
    get_to_if(j, "eq5_minus_one", g.eq5_minus_one);
}

void parse_segmentation(const json& j, SegmentConfig& s, bool& mrf_seed_set) {
    reject_unknown(j, {"clahe_tiles", "clahe_clip", "clahe_bins", "mrf_labels", "mrf_beta",
                       "mrf_sweeps", "mrf_seed", "vessel_top_fraction", "entropy_window",
                       "entropy_bins", "entropy_threshold_bits", "dilate_radius", "connectivity"},
                   "segmentation.");
    if (j.contains("clahe_tiles")) {
        auto v = j.at("clahe_tiles").get<std::vector<int>>();
        if (v.size() != 2) throw ParseError("config: segmentation.clahe_tiles must be [nx, ny]");
        s.clahe_tiles_x = v[0];
        s.clahe_tiles_y = v[1];
    }
    get_to_if(j, "clahe_clip", s.clahe_clip);
    get_to_if(j, "clahe_bins", s.clahe_bins);
    get_to_if(j, "mrf_labels", s.mrf.label_count);
    get_to_if(j, "mrf_beta", s.mrf.beta_potts);
    get_to_if(j, "mrf_sweeps", s.mrf.max_sweeps);
    if (j.contains("mrf_seed")) {
        j.at("mrf_seed").get_to(s.mrf.init_seed);
        mrf_seed_set = true;
    }
    get_to_if(j, "vessel_top_fraction", s.vessel_top_fraction);
    get_to_if(j, "entropy_window", s.entropy_window);
    get_to_if(j, "entropy_bins", s.entropy_bins);
    get_to_if(j, "entropy_threshold_bits", s.entropy_threshold_bits);
    get_to_if(j, "dilate_radius", s.dilate_radius);
    get_to_if(j, "connectivity", s.connectivity);
}

void parse_matching(const json& j, MatchingConfig& m) {
    reject_unknown(j, {"affine_mode", "shift_range", "affine_matrix", "affine_file", "range_px",
                       "gp", "gate", "max_edge_points"},
                   "matching.");
    if (j.contains("affine_mode")) {
        std::string mode = j.at("affine_mode").get<std::string>();
        if (mode == "auto")
            m.affine_mode = AffineMode::auto_translation;
        else if (mode == "matrix")
            m.affine_mode = AffineMode::matrix;
        else if (mode == "file")
            m.affine_mode = AffineMode::file;
        else
            throw ParseError("config: matching.affine_mode must be auto|matrix|file");
    }
    get_to_if(j, "shift_range", m.shift_range);
    if (j.contains("affine_matrix")) {
        auto v = j.at("affine_matrix").get<std::vector<double>>();
        if (v.size() != 9) throw ParseError("config: matching.affine_matrix must have 9 numbers");
        std::copy(v.begin(), v.end(), m.affine_matrix.begin());
    }
    get_to_if(j, "affine_file", m.affine_file);
    get_to_if(j, "range_px", m.range_px);
    if (j.contains("gp")) {
        const json& g = j.at("gp");
        reject_unknown(g, {"theta0", "theta1", "theta2", "theta3", "beta_inv"}, "matching.gp.");
        get_to_if(g, "theta0", m.dense.gp.theta0);
        get_to_if(g, "theta1", m.dense.gp.theta1);
        get_to_if(g, "theta2", m.dense.gp.theta2);
        get_to_if(g, "theta3", m.dense.gp.theta3);
        get_to_if(g, "beta_inv", m.dense.gp.beta_inv);
    }
    get_to_if(j, "gate", m.dense.gate);
    get_to_if(j, "max_edge_points", m.dense.max_edge_points);
}

void parse_render(const json& j, RenderParams& r, bool& noise_seed_set) {
    reject_unknown(j, {"canvas", "vessel_intensity", "background_intensity", "noise_sigma",
                       "noise_seed", "clutter", "bone_intensity", "bone_center", "bone_radius"},
                   "synth.render.");
    if (j.contains("canvas")) {
        auto v = j.at("canvas").get<std::vector<int>>();
        if (v.size() != 2) throw ParseError("config: synth.render.canvas must be [w, h]");
        r.canvas_width = v[0];
        r.canvas_height = v[1];
    }
    get_to_if(j, "vessel_intensity", r.vessel_intensity);
    get_to_if(j, "background_intensity", r.background_intensity);
    get_to_if(j, "noise_sigma", r.noise_sigma);
    if (j.contains("noise_seed")) {
        j.at("noise_seed").get_to(r.noise_seed);
        noise_seed_set = true;
    }
    if (j.contains("clutter")) {
        std::string c = j.at("clutter").get<std::string>();
        if (c == "none")
            r.clutter = Clutter::none;
        else if (c == "bone_disk")
            r.clutter = Clutter::bone_disk;
        else
            throw ParseError("config: synth.render.clutter must be none|bone_disk");
    }
    get_to_if(j, "bone_intensity", r.bone_intensity);
    if (j.contains("bone_center")) {
        auto v = j.at("bone_center").get<std::vector<double>>();
        if (v.size() != 2) throw ParseError("config: synth.render.bone_center must be [x, y]");
        r.bone_center_x = v[0];
        r.bone_center_y = v[1];
    }
    get_to_if(j, "bone_radius", r.bone_radius);
}

TreeSpec parse_tree_spec(const json& j, const TreeSpec& base, const std::string& scope) {
    reject_unknown(j, {"seed", "depth", "length", "angle_deg", "radius", "z", "corner_count",
                       "node_spacing"},
                   scope);
    TreeSpec s = base;
    get_to_if(j, "seed", s.seed);
    get_to_if(j, "depth", s.depth);
    auto range = [&](const char* key, double& lo, double& hi) {
        if (!j.contains(key)) return;
        auto v = j.at(key).get<std::vector<double>>();
        if (v.size() != 2) throw ParseError("config: " + scope + key + " must be [min, max]");
        lo = v[0];
        hi = v[1];
    };
    range("length", s.length_min, s.length_max);
    range("angle_deg", s.angle_min_deg, s.angle_max_deg);
    range("radius", s.radius_min, s.radius_max);
    range("z", s.z_min, s.z_max);
    get_to_if(j, "corner_count", s.corner_count);
    get_to_if(j, "node_spacing", s.node_spacing);
    return s;
}

}  // namespace

PipelineConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config: top level must be an object");
    reject_unknown(j, {"seed", "geometry", "segmentation", "matching", "reconstruction",
                       "evaluation", "synth"},
                   "");

    PipelineConfig c = default_config();
    bool mrf_seed_set = false, noise_seed_set = false;
    get_to_if(j, "seed", c.seed);
    if (j.contains("geometry")) parse_geometry(j.at("geometry"), c.geometry);
    if (j.contains("segmentation")) parse_segmentation(j.at("segmentation"), c.segmentation, mrf_seed_set);
    if (j.contains("matching")) parse_matching(j.at("matching"), c.matching);
    if (j.contains("reconstruction")) {
        const json& r = j.at("reconstruction");
        reject_unknown(r, {"smooth_step", "ring_segments"}, "reconstruction.");
        get_to_if(r, "smooth_step", c.reconstruction.smooth_step);
        get_to_if(r, "ring_segments", c.reconstruction.ring_segments);
    }
    if (j.contains("evaluation")) {
        const json& e = j.at("evaluation");
        reject_unknown(e, {"normalize", "thresholds", "histogram_bin_width"}, "evaluation.");
        get_to_if(e, "normalize", c.evaluation.normalize);
        get_to_if(e, "thresholds", c.evaluation.thresholds);
        get_to_if(e, "histogram_bin_width", c.evaluation.histogram_bin_width);
    }
    if (j.contains("synth")) {
        const json& s = j.at("synth");
        reject_unknown(s, {"render", "specs"}, "synth.");
        if (s.contains("render")) parse_render(s.at("render"), c.render, noise_seed_set);
        if (s.contains("specs")) {
            for (auto it = s.at("specs").begin(); it != s.at("specs").end(); ++it) {
                TreeSpec base = c.tree_specs.count(it.key()) ? c.tree_specs[it.key()] : TreeSpec{};
                c.tree_specs[it.key()] =
                    parse_tree_spec(it.value(), base, "synth.specs." + it.key() + ".");
            }
        }
    }
    // The master seed drives the stage seeds unless set explicitly.
    if (!mrf_seed_set) c.segmentation.mrf.init_seed = c.seed;
    if (!noise_seed_set) c.render.noise_seed = c.seed + 1;
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const PipelineConfig& c) {
    json j;
    j["seed"] = c.seed;
    json& g = j["geometry"];
    g["hx"] = c.geometry.source_height;
    g["a"] = c.geometry.half_baseline;
    std::vector<double> m(9);
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) m[r * 3 + col] = c.geometry.intrinsics(r, col);
    g["intrinsics"] = m;
    g["magnification_correction"] = c.geometry.magnification_correction;
    g["disparity_x_only"] = c.geometry.disparity_x_only;
    g["eq5_minus_one"] = c.geometry.eq5_minus_one;

    json& s = j["segmentation"];
    s["clahe_tiles"] = {c.segmentation.clahe_tiles_x, c.segmentation.clahe_tiles_y};
    s["clahe_clip"] = c.segmentation.clahe_clip;
    s["clahe_bins"] = c.segmentation.clahe_bins;
    s["mrf_labels"] = c.segmentation.mrf.label_count;
    s["mrf_beta"] = c.segmentation.mrf.beta_potts;
    s["mrf_sweeps"] = c.segmentation.mrf.max_sweeps;
    s["mrf_seed"] = c.segmentation.mrf.init_seed;
    s["vessel_top_fraction"] = c.segmentation.vessel_top_fraction;
    s["entropy_window"] = c.segmentation.entropy_window;
    s["entropy_bins"] = c.segmentation.entropy_bins;
    s["entropy_threshold_bits"] = c.segmentation.entropy_threshold_bits;
    s["dilate_radius"] = c.segmentation.dilate_radius;
    s["connectivity"] = c.segmentation.connectivity;

    json& mt = j["matching"];
    mt["affine_mode"] = c.matching.affine_mode == AffineMode::auto_translation ? "auto"
                        : c.matching.affine_mode == AffineMode::matrix         ? "matrix"
                                                                               : "file";
    mt["shift_range"] = c.matching.shift_range;
    mt["affine_matrix"] = c.matching.affine_matrix;
    mt["affine_file"] = c.matching.affine_file;
    mt["range_px"] = c.matching.range_px;
    mt["gp"] = {{"theta0", c.matching.dense.gp.theta0},
                {"theta1", c.matching.dense.gp.theta1},
                {"theta2", c.matching.dense.gp.theta2},
                {"theta3", c.matching.dense.gp.theta3},
                {"beta_inv", c.matching.dense.gp.beta_inv}};
    mt["gate"] = c.matching.dense.gate;
    mt["max_edge_points"] = c.matching.dense.max_edge_points;

    j["reconstruction"] = {{"smooth_step", c.reconstruction.smooth_step},
                           {"ring_segments", c.reconstruction.ring_segments}};
    j["evaluation"] = {{"normalize", c.evaluation.normalize},
                       {"thresholds", c.evaluation.thresholds},
                       {"histogram_bin_width", c.evaluation.histogram_bin_width}};

    json& rn = j["synth"]["render"];
    rn["canvas"] = {c.render.canvas_width, c.render.canvas_height};
    rn["vessel_intensity"] = c.render.vessel_intensity;
    rn["background_intensity"] = c.render.background_intensity;
    rn["noise_sigma"] = c.render.noise_sigma;
    rn["noise_seed"] = c.render.noise_seed;
    rn["clutter"] = c.render.clutter == Clutter::none ? "none" : "bone_disk";
    rn["bone_intensity"] = c.render.bone_intensity;
    rn["bone_center"] = {c.render.bone_center_x, c.render.bone_center_y};
    rn["bone_radius"] = c.render.bone_radius;

    json& sp = j["synth"]["specs"];
    for (const auto& [name, t] : c.tree_specs) {
        sp[name] = {{"seed", t.seed},
                    {"depth", t.depth},
                    {"length", {t.length_min, t.length_max}},
                    {"angle_deg", {t.angle_min_deg, t.angle_max_deg}},
                    {"radius", {t.radius_min, t.radius_max}},
                    {"z", {t.z_min, t.z_max}},
                    {"corner_count", t.corner_count},
                    {"node_spacing", t.node_spacing}};
    }
    return j.dump(2) + "\n";
}

std::vector<std::string> validate_config(const PipelineConfig& c) {
    std::vector<std::string> errors;
    auto check = [&](const char* scope, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            errors.push_back(std::string(scope) + ": " + e.what());
        }
    };
    check("geometry", [&] { c.geometry.validate(); });
    check("segmentation", [&] { c.segmentation.validate(); });
    check("matching", [&] {
        c.matching.dense.gp.validate();
        if (c.matching.range_px <= 0) throw ParameterError("range_px must be > 0");
        if (c.matching.dense.gate <= 0) throw ParameterError("gate must be > 0");
        if (c.matching.dense.max_edge_points < 2)
            throw ParameterError("max_edge_points must be >= 2");
        if (c.matching.shift_range < 1) throw ParameterError("shift_range must be >= 1");
        if (c.matching.affine_mode == AffineMode::matrix)
            Affine2D::from_row_major(c.matching.affine_matrix);
        if (c.matching.affine_mode == AffineMode::file && c.matching.affine_file.empty())
            throw ParameterError("affine_file required in file mode");
    });
    check("reconstruction", [&] {
        if (c.reconstruction.smooth_step <= 0) throw ParameterError("smooth_step must be > 0");
        if (c.reconstruction.ring_segments < 3) throw ParameterError("ring_segments must be >= 3");
    });
    check("evaluation", [&] {
        if (c.evaluation.histogram_bin_width <= 0)
            throw ParameterError("histogram_bin_width must be > 0");
        for (double t : c.evaluation.thresholds)
            if (t <= 0) throw ParameterError("thresholds must be > 0");
    });
    check("synth.render", [&] { c.render.validate(); });
    for (const auto& [name, spec] : c.tree_specs) {
        check(("synth.specs." + name).c_str(), [&] {
            spec.validate();
            if (spec.z_max >= c.geometry.source_height)
                throw ParameterError("z range must stay below geometry hx");
        });
    }
    return errors;
}

uint64_t config_hash(const PipelineConfig& config) {
    const std::string text = config_to_json_text(config);
    uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash_hex(const PipelineConfig& config) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(config)));
    return buf;
}

}  // namespace vrec
