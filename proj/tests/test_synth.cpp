#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "test_util.hpp"
#include "vrec/raster_ops.hpp"
#include "vrec/synth.hpp"

using namespace vrec;
using testutil::uniform;

namespace {

StereoGeometry test_geometry() {
    StereoGeometry g;
    g.source_height = 1000;
    g.half_baseline = 50;
    g.intrinsics << 1, 0, 384, 0, 1, 60, 0, 0, 1;
    return g;
}

}  // namespace

TEST_CASE("gen_tree: depth 1 is a single straight branch") {
    TreeSpec spec;
    spec.depth = 1;
    spec.corner_count = 0;
    spec.seed = 5;
    VesselTree t = gen_tree(spec);
    t.validate();
    int bif = 0, term = 0;
    for (const auto& n : t.nodes) {
        bif += n.kind == NodeKind::bifurcation;
        term += n.kind == NodeKind::terminal;
    }
    CHECK(bif == 0);
    CHECK(term == 2);  // root and tip
    // Straight: all nodes on the trunk line (heading 0 = +y).
    for (const auto& n : t.nodes) CHECK(n.x == doctest::Approx(0.0));
}

TEST_CASE("gen_tree: deterministic per seed") {
    TreeSpec spec;
    spec.depth = 3;
    spec.corner_count = 2;
    spec.seed = 77;
    VesselTree a = gen_tree(spec);
    VesselTree b = gen_tree(spec);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a.nodes[i].x == b.nodes[i].x);
        CHECK(a.nodes[i].y == b.nodes[i].y);
        CHECK(a.nodes[i].z == b.nodes[i].z);
        CHECK(a.nodes[i].radius == b.nodes[i].radius);
    }
    spec.seed = 78;
    VesselTree c = gen_tree(spec);
    bool differs = c.size() != a.size();
    if (!differs)
        for (size_t i = 0; i < a.size() && !differs; ++i) differs = a.nodes[i].x != c.nodes[i].x;
    CHECK(differs);
}

TEST_CASE("gen_tree: branching arithmetic and z range") {
    for (int depth : {1, 2, 3, 4}) {
        TreeSpec spec;
        spec.depth = depth;
        spec.seed = depth * 13 + 1;
        VesselTree t = gen_tree(spec);
        t.validate();
        int bif = 0, term = 0;
        for (const auto& n : t.nodes) {
            bif += n.kind == NodeKind::bifurcation;
            term += n.kind == NodeKind::terminal;
            CHECK(n.z >= spec.z_min);
            CHECK(n.z <= spec.z_max);
        }
        // Full binary layout: 2^(depth-1) - 1 splits, 2^(depth-1) leaf tips
        // plus the root terminal.
        CHECK(bif == (1 << (depth - 1)) - 1);
        CHECK(term == (1 << (depth - 1)) + 1);
    }
}

TEST_CASE("gen_tree: invalid specs") {
    TreeSpec bad;
    bad.z_min = -5;
    CHECK_THROWS_AS(gen_tree(bad), ParameterError);
    TreeSpec bad2;
    bad2.depth = 0;
    CHECK_THROWS_AS(gen_tree(bad2), ParameterError);
}

TEST_CASE("project: symmetric point splits to -/+5 and inverts through Eq. 4") {
    StereoGeometry g;
    g.source_height = 100;
    g.half_baseline = 5;  // identity intrinsics
    VesselTree t;
    t.dimensionality = 3;
    VesselNode n;
    n.id = 1;
    n.parent_id = -1;
    n.x = 0;
    n.y = 0;
    n.z = 50;
    n.radius = 1;
    t.nodes.push_back(n);
    VesselTree pa = project(g, -5, t);
    VesselTree pb = project(g, +5, t);
    CHECK(pa.nodes[0].x == doctest::Approx(5.0));   // source -a projects to +5
    CHECK(pb.nodes[0].x == doctest::Approx(-5.0));  // source +a projects to -5
    double d = std::abs(pa.nodes[0].x - pb.nodes[0].x);
    CHECK(depth_from_disparity(g, d) == doctest::Approx(50.0));
}

TEST_CASE("project: z = hx projects identically from both sources") {
    StereoGeometry g;
    g.source_height = 100;
    g.half_baseline = 5;
    VesselTree t;
    t.dimensionality = 3;
    VesselNode n;
    n.id = 1;
    n.parent_id = -1;
    n.x = 7;
    n.y = 3;
    n.z = 100;
    t.nodes.push_back(n);
    VesselTree pa = project(g, -5, t);
    VesselTree pb = project(g, +5, t);
    CHECK(pa.nodes[0].x == doctest::Approx(pb.nodes[0].x));
    CHECK(pa.nodes[0].y == doctest::Approx(pb.nodes[0].y));

    n.z = 150;  // behind the detector
    VesselTree bad;
    bad.dimensionality = 3;
    bad.nodes.push_back(n);
    CHECK_THROWS_AS(project(g, -5, bad), GeometryError);
}

TEST_CASE("project_stereo: 1000 random points triangulate back to 1e-9") {
    StereoGeometry g = test_geometry();
    g.magnification_correction = true;
    std::mt19937_64 rng(3);
    VesselTree t;
    t.dimensionality = 3;
    for (int i = 0; i < 1000; ++i) {
        VesselNode n;
        n.id = i + 1;
        n.parent_id = i == 0 ? -1 : i;
        n.x = uniform(rng) * 300 - 150;
        n.y = uniform(rng) * 300 - 150;
        n.z = 10 + uniform(rng) * 980;
        t.nodes.push_back(n);
    }
    ProjectedTree pt = project_stereo(g, t);
    CHECK(pt.truth.size() == t.size());
    for (const auto& n : t.nodes) {
        const auto& truth = pt.truth.at(n.id);
        Point2 wa = to_world(g.intrinsics, truth.pixel_a);
        Point2 wb = to_world(g.intrinsics, truth.pixel_b);
        Point3D p = triangulate(g, wa, wb);
        CHECK(std::abs(p.x - n.x) < 1e-9);
        CHECK(std::abs(p.y - n.y) < 1e-9);
        CHECK(std::abs(p.z - n.z) < 1e-9);
        CHECK(truth.depth == n.z);
    }
}

TEST_CASE("rasterize: stroke thickness matches the projected radius") {
    VesselTree t;
    t.dimensionality = 2;
    for (int i = 0; i < 2; ++i) {
        VesselNode n;
        n.id = i + 1;
        n.parent_id = i == 0 ? -1 : 1;
        n.x = 20 + i * 88;
        n.y = 64;
        n.radius = 5;
        t.nodes.push_back(n);
    }
    RenderParams params;
    params.canvas_width = 128;
    params.canvas_height = 128;
    params.noise_sigma = 0;
    GrayImage img = rasterize(t, params);
    // Mid-span column: count pixels at or above half vessel coverage.
    int thick = 0;
    for (int y = 0; y < 128; ++y)
        if (img.at(64, y) >= 140) ++thick;
    CHECK(thick >= 10);
    CHECK(thick <= 11);
}

TEST_CASE("rasterize: empty tree gives a flat noise image") {
    VesselTree empty;
    empty.dimensionality = 2;
    RenderParams params;
    params.canvas_width = 64;
    params.canvas_height = 64;
    params.noise_sigma = 3;
    GrayImage img = rasterize(empty, params);
    double mean = 0;
    for (auto v : img.data()) mean += v;
    mean /= img.size();
    CHECK(mean == doctest::Approx(params.background_intensity).epsilon(0.01));
    // Deterministic given the seed.
    GrayImage img2 = rasterize(empty, params);
    CHECK(img.data() == img2.data());
}

TEST_CASE("rasterize: bone disk edge has higher local entropy than the vessel interior") {
    VesselTree t;
    t.dimensionality = 2;
    for (int i = 0; i < 2; ++i) {
        VesselNode n;
        n.id = i + 1;
        n.parent_id = i == 0 ? -1 : 1;
        n.x = 10 + i * 100;
        n.y = 30;
        n.radius = 6;
        t.nodes.push_back(n);
    }
    RenderParams params;
    params.canvas_width = 128;
    params.canvas_height = 128;
    params.clutter = Clutter::bone_disk;
    params.bone_center_x = 64;
    params.bone_center_y = 90;
    params.bone_radius = 25;
    params.noise_sigma = 2;
    GrayImage img = rasterize(t, params);
    CHECK(img.at(64, 90) > 130);  // bone interior painted

    BinaryMask all(128, 128, true);
    EntropyMap ent = local_entropy(img, all, 9, 64);
    double edge_entropy = ent.at(64, 90 - 25);  // top of the disk
    double vessel_entropy = ent.at(60, 30);     // stroke interior
    CHECK(edge_entropy > vessel_entropy + 0.5);
}

TEST_CASE("ground-truth correspondence table is injective and total") {
    StereoGeometry g = test_geometry();
    TreeSpec spec;
    spec.seed = 9;
    spec.depth = 3;
    VesselTree t = gen_tree(spec);
    ProjectedTree pt = project_stereo(g, t);
    CHECK(pt.truth.size() == t.size());
    std::set<std::pair<double, double>> seen_a, seen_b;
    for (const auto& [id, truth] : pt.truth) {
        CHECK(seen_a.insert({truth.pixel_a.x(), truth.pixel_a.y()}).second);
        CHECK(seen_b.insert({truth.pixel_b.x(), truth.pixel_b.y()}).second);
    }
    CHECK(pt.view_a.size() == t.size());
    CHECK(pt.view_b.size() == t.size());
}
