#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "test_util.hpp"
#include "vrec/swc.hpp"
#include "vrec/tree.hpp"

using namespace vrec;

namespace {

int component_count(const BinaryMask& m) {
    std::vector<int> label(m.size(), -1);
    int next = 0;
    const int w = m.width(), h = m.height();
    std::vector<size_t> todo;
    for (size_t s = 0; s < m.size(); ++s) {
        if (!m.data()[s] || label[s] >= 0) continue;
        todo.assign(1, s);
        label[s] = next;
        while (!todo.empty()) {
            size_t p = todo.back();
            todo.pop_back();
            int px = int(p % w), py = int(p / w);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int qx = px + dx, qy = py + dy;
                    if ((dx || dy) && qx >= 0 && qy >= 0 && qx < w && qy < h) {
                        size_t q = size_t(qy) * w + qx;
                        if (m.data()[q] && label[q] < 0) {
                            label[q] = next;
                            todo.push_back(q);
                        }
                    }
                }
        }
        ++next;
    }
    return next;
}

bool has_full_2x2(const BinaryMask& m) {
    for (int y = 0; y + 1 < m.height(); ++y)
        for (int x = 0; x + 1 < m.width(); ++x)
            if (m.at(x, y) && m.at(x + 1, y) && m.at(x, y + 1) && m.at(x + 1, y + 1)) return true;
    return false;
}

VesselTree straight_line_tree(int n) {
    VesselTree t;
    t.dimensionality = 2;
    for (int i = 0; i < n; ++i) {
        VesselNode v;
        v.id = i + 1;
        v.parent_id = i == 0 ? -1 : i;
        v.x = i;
        v.y = 0;
        v.radius = 1;
        t.nodes.push_back(v);
    }
    t.reclassify();
    return t;
}

}  // namespace

TEST_CASE("yokoi number on fixed patterns") {
    // Middle of a horizontal line: removal would split it.
    BinaryMask line(5, 3);
    for (int x = 0; x < 5; ++x) line.set(x, 1, true);
    CHECK(yokoi_number(line, 2, 1) == 2);
    // End of a line: simple.
    CHECK(yokoi_number(line, 0, 1) == 1);
    // Isolated pixel.
    BinaryMask dot(3, 3);
    dot.set(1, 1, true);
    CHECK(yokoi_number(dot, 1, 1) == 0);
    // Hub whose three arms touch nothing but the center: N, SW, SE spokes.
    BinaryMask hub(5, 5);
    hub.set(2, 2, true);
    hub.set(2, 1, true);
    hub.set(1, 3, true);
    hub.set(3, 3, true);
    CHECK(yokoi_number(hub, 2, 2) == 3);
    // A dense T center stays simple: the arms remain diagonally connected.
    BinaryMask tee(5, 5);
    for (int x = 0; x < 5; ++x) tee.set(x, 2, true);
    for (int y = 3; y < 5; ++y) tee.set(2, y, true);
    CHECK(yokoi_number(tee, 2, 2) == 1);
}

TEST_CASE("thin: filled rectangle becomes a 1-px curve along the long axis") {
    BinaryMask rect(26, 11);
    for (int y = 3; y < 8; ++y)
        for (int x = 3; x < 23; ++x) rect.set(x, y, true);
    BinaryMask skel = thin(rect);
    CHECK(component_count(skel) == 1);
    CHECK(!has_full_2x2(skel));
    int min_x = 99, max_x = -1;
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 26; ++x)
            if (skel.at(x, y)) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                CHECK(std::abs(y - 5) <= 1);  // stays near the midline
            }
    CHECK(max_x - min_x >= 20 - 2 * 5);  // spans the long axis
}

TEST_CASE("thin: fixed points") {
    BinaryMask dot(5, 5);
    dot.set(2, 2, true);
    CHECK(thin(dot) == dot);

    BinaryMask line(9, 3);
    for (int x = 1; x < 8; ++x) line.set(x, 1, true);
    CHECK(thin(line) == line);
}

TEST_CASE("thin: invariants on random blobs, idempotence") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        BinaryMask blobs = testutil::random_blobs(48, 48, 3 + trial % 3, rng);
        BinaryMask skel = thin(blobs);
        CHECK(!has_full_2x2(skel));
        CHECK(component_count(skel) == component_count(blobs));
        CHECK(thin(skel) == skel);
        // Thinning only removes pixels.
        for (size_t i = 0; i < blobs.size(); ++i)
            if (skel.data()[i]) CHECK(blobs.data()[i]);
    }
}

TEST_CASE("trace: plus shape gives 1 bifurcation, 4 terminals") {
    BinaryMask plus(9, 9);
    for (int t = 1; t < 8; ++t) {
        plus.set(t, 4, true);
        plus.set(4, t, true);
    }
    VesselTree t = trace(plus);
    t.validate();
    CHECK(t.size() == plus.count());
    int bif = 0, term = 0;
    for (const auto& n : t.nodes) {
        bif += n.kind == NodeKind::bifurcation;
        term += n.kind == NodeKind::terminal;
    }
    CHECK(bif == 1);
    CHECK(term == 4);
}

TEST_CASE("trace: straight line is a chain rooted at the smallest (y,x) terminal") {
    BinaryMask line(10, 3);
    for (int x = 2; x < 9; ++x) line.set(x, 1, true);
    VesselTree t = trace(line);
    t.validate();
    CHECK(t.nodes[0].parent_id == -1);
    CHECK(t.nodes[0].kind == NodeKind::terminal);
    CHECK(t.nodes[0].x == 2);  // smallest (y, x) terminal
    CHECK(t.nodes[0].y == 1);
    int bif = 0, edge = 0, term = 0;
    for (const auto& n : t.nodes) {
        bif += n.kind == NodeKind::bifurcation;
        edge += n.kind == NodeKind::edge;
        term += n.kind == NodeKind::terminal;
    }
    CHECK(bif == 0);
    CHECK(term == 2);
    CHECK(edge == int(line.count()) - 2);
}

TEST_CASE("trace: Y shape matches the hand-enumerated pixel graph") {
    // Stem (4,0)..(4,4), then arms to upper... build downward Y:
    // stem rows 0-4 at x=4; arms (3,5),(2,6),(1,7) and (5,5),(6,6),(7,7).
    BinaryMask y(9, 9);
    for (int r = 0; r <= 4; ++r) y.set(4, r, true);
    for (int s = 1; s <= 3; ++s) {
        y.set(4 - s, 4 + s, true);
        y.set(4 + s, 4 + s, true);
    }
    VesselTree t = trace(y);
    t.validate();
    CHECK(t.size() == y.count());
    int bif = 0;
    std::vector<int> term_ids;
    for (const auto& n : t.nodes) {
        if (n.kind == NodeKind::bifurcation) ++bif;
        if (n.kind == NodeKind::terminal) term_ids.push_back(n.id);
    }
    CHECK(bif == 1);
    CHECK(term_ids.size() == 3);
    // Branch pixel counts: stem 4 pixels above the junction, arms 3 each.
    auto ch = t.children();
    int junction = -1;
    for (size_t i = 0; i < t.size(); ++i)
        if (t.nodes[i].kind == NodeKind::bifurcation) junction = int(i);
    REQUIRE(junction >= 0);
    CHECK(t.nodes[junction].x == 4);
    CHECK(t.nodes[junction].y == 4);
    for (int c : ch[junction]) {
        int len = 0;
        int cur = c;
        while (true) {
            ++len;
            auto& kids = ch[cur];
            if (kids.empty()) break;
            cur = kids[0];
        }
        CHECK(len == 3);  // each downstream arm has 3 pixels
    }
}

TEST_CASE("trace: empty skeleton raises; cycles are broken") {
    BinaryMask empty(8, 8);
    CHECK_THROWS_AS(trace(empty), ParameterError);

    // A ring: 8-connected cycle.
    BinaryMask ring(7, 7);
    for (int t = 1; t < 6; ++t) {
        ring.set(t, 1, true);
        ring.set(t, 5, true);
        ring.set(1, t, true);
        ring.set(5, t, true);
    }
    int removed = 0;
    VesselTree t = trace(ring, &removed);
    t.validate();
    CHECK(removed >= 1);
    CHECK(t.size() == ring.count());
}

TEST_CASE("trace: multiple components picks the largest") {
    BinaryMask two(16, 5);
    for (int x = 0; x < 9; ++x) two.set(x, 1, true);
    for (int x = 12; x < 15; ++x) two.set(x, 3, true);
    VesselTree t = trace(two);
    CHECK(t.size() == 9);
}

TEST_CASE("estimate_radii: strip of thickness 11 gives radius 5 inside") {
    BinaryMask strip(40, 21);
    for (int y = 5; y <= 15; ++y)  // 11 rows
        for (int x = 0; x < 40; ++x) strip.set(x, y, true);
    VesselTree center = straight_line_tree(30);
    for (auto& n : center.nodes) {
        n.x += 5;
        n.y = 10;  // middle row
    }
    VesselTree out = estimate_radii(center, strip);
    for (size_t i = 2; i + 2 < out.size(); ++i)
        CHECK(out.nodes[i].radius == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("estimate_radii: 1-px skeleton mask gives the half-pixel radius") {
    BinaryMask line(20, 5);
    for (int x = 0; x < 20; ++x) line.set(x, 2, true);
    VesselTree t = straight_line_tree(12);
    for (auto& n : t.nodes) {
        n.x += 4;
        n.y = 2;
    }
    VesselTree out = estimate_radii(t, line);
    for (size_t i = 1; i + 1 < out.size(); ++i)
        CHECK(out.nodes[i].radius == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("estimate_radii: node outside mask gets radius 0") {
    BinaryMask m(10, 10);
    m.set(2, 2, true);
    VesselTree t = straight_line_tree(2);
    t.nodes[0].x = 2;
    t.nodes[0].y = 2;
    t.nodes[1].x = 8;
    t.nodes[1].y = 8;  // outside
    VesselTree out = estimate_radii(t, m);
    CHECK(out.nodes[1].radius == 0.0);
}

TEST_CASE("estimate_radii: drawn circular arc recovers half-width within 1 px") {
    // Arc of radius 30 around (40,40), drawn width 9 (halfwidth 4.5).
    BinaryMask m(80, 80);
    for (int y = 0; y < 80; ++y)
        for (int x = 0; x < 80; ++x) {
            double r = std::hypot(x - 40.0, y - 40.0);
            if (std::abs(r - 30.0) <= 4.5 && x >= 40) m.set(x, y, true);
        }
    VesselTree t;
    t.dimensionality = 2;
    int id = 0;
    for (double ang = -1.1; ang <= 1.1; ang += 0.05) {
        VesselNode n;
        n.id = ++id;
        n.parent_id = id == 1 ? -1 : id - 1;
        n.x = 40 + 30 * std::cos(ang);
        n.y = 40 + 30 * std::sin(ang);
        t.nodes.push_back(n);
    }
    t.reclassify();
    VesselTree out = estimate_radii(t, m);
    int good = 0, total = 0;
    for (size_t i = 2; i + 2 < out.size(); ++i) {
        ++total;
        if (std::abs(out.nodes[i].radius - 4.5) <= 1.0) ++good;
    }
    CHECK(double(good) >= 0.9 * total);
}

TEST_CASE("swc: single node") {
    VesselTree t;
    t.dimensionality = 2;
    VesselNode n;
    n.id = 1;
    n.parent_id = -1;
    n.x = 3;
    n.y = 4;
    n.radius = 2;
    n.kind = NodeKind::terminal;
    t.nodes.push_back(n);
    std::string text = swc_write(t);
    CHECK(text.find("1 7 3 4 0 2 -1") != std::string::npos);
    VesselTree back = swc_read(text);
    CHECK(back.size() == 1);
    CHECK(back.dimensionality == 2);
    CHECK(back.nodes[0].parent_id == -1);
}

TEST_CASE("swc: random trees round trip exactly") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        VesselTree t;
        t.dimensionality = trial % 2 ? 3 : 2;
        int n = 1 + int(rng() % 40);
        for (int i = 1; i <= n; ++i) {
            VesselNode v;
            v.id = i;
            v.parent_id = i == 1 ? -1 : 1 + int(rng() % (i - 1));
            v.x = testutil::uniform(rng) * 100;
            v.y = testutil::uniform(rng) * 100;
            v.z = t.dimensionality == 3 ? testutil::uniform(rng) * 50 : 0;
            v.radius = testutil::uniform(rng) * 5;
            t.nodes.push_back(v);
        }
        t.reclassify();
        VesselTree back = swc_read(swc_write(t));
        REQUIRE(back.size() == t.size());
        CHECK(back.dimensionality == t.dimensionality);
        for (size_t i = 0; i < t.size(); ++i) {
            CHECK(back.nodes[i].id == t.nodes[i].id);
            CHECK(back.nodes[i].parent_id == t.nodes[i].parent_id);
            CHECK(back.nodes[i].x == t.nodes[i].x);
            CHECK(back.nodes[i].y == t.nodes[i].y);
            CHECK(back.nodes[i].z == t.nodes[i].z);
            CHECK(back.nodes[i].radius == t.nodes[i].radius);
            CHECK(back.nodes[i].kind == t.nodes[i].kind);
        }
    }
}

TEST_CASE("swc: five-node fixture has 1 bifurcation and 3 terminals") {
    // Authored against the SWC spec: chain 1-2-3, then 3 splits into 4 and 5.
    const std::string fixture =
        "# test fixture\n"
        "1 7 0 0 0 1 -1\n"
        "2 7 0 1 0 1 1\n"
        "3 7 0 2 0 1 2\n"
        "4 7 -1 3 0 1 3\n"
        "5 7 1 3 0 1 3\n";
    VesselTree t = swc_read(fixture);
    CHECK(t.size() == 5);
    int bif = 0, term = 0;
    for (const auto& n : t.nodes) {
        bif += n.kind == NodeKind::bifurcation;
        term += n.kind == NodeKind::terminal;
    }
    CHECK(bif == 1);
    CHECK(term == 3);
}

TEST_CASE("swc: parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(swc_read("1 7 0 0 0 1 -1\nbroken line\n"),
                         doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_WITH_AS(swc_read("1 7 0 0 0 1 -1\n1 7 1 0 0 1 1\n"),
                         doctest::Contains("duplicate"), ParseError);
    CHECK_THROWS_WITH_AS(swc_read("1 7 0 0 0 1 -1\n2 7 1 0 0 1 3\n3 7 2 0 0 1 1\n"),
                         doctest::Contains("parent"), ParseError);
    CHECK_THROWS_AS(swc_read("# only comments\n"), ParseError);
}
