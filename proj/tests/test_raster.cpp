#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "vrec/raster_ops.hpp"

using namespace vrec;
using testutil::mask_from;
using testutil::random_mask;

namespace {

// Independent reference: plain histogram equalization of one pixel region
// with optional clipping, same documented mapping contract as clahe().
std::vector<uint16_t> reference_equalization_map(const std::vector<uint16_t>& pixels, int levels,
                                                 int bins, double clip_limit) {
    std::vector<double> hist(bins, 0.0);
    for (uint16_t v : pixels) hist[static_cast<int>(int64_t(v) * bins / levels)] += 1.0;
    const double limit = clip_limit * pixels.size();
    for (;;) {
        double excess = 0;
        for (double& h : hist)
            if (h > limit) {
                excess += h - limit;
                h = limit;
            }
        if (excess <= 0) break;
        for (double& h : hist) h += excess / bins;
        if (excess < bins) break;
    }
    std::vector<uint16_t> map(bins);
    double cdf = 0;
    for (int b = 0; b < bins; ++b) {
        cdf += hist[b];
        map[b] = static_cast<uint16_t>(
            std::lround(std::clamp(cdf / pixels.size() * (levels - 1), 0.0, double(levels - 1))));
    }
    return map;
}

// Brute-force flood fill labeling, DFS-free recursive-scan variant.
std::vector<int> flood_labels(const BinaryMask& m, int connectivity) {
    std::vector<int> label(m.size(), -1);
    int next = 0;
    std::vector<size_t> todo;
    const int w = m.width(), h = m.height();
    for (size_t s = 0; s < m.size(); ++s) {
        if (!m.data()[s] || label[s] >= 0) continue;
        todo.assign(1, s);
        label[s] = next;
        while (!todo.empty()) {
            size_t p = todo.back();
            todo.pop_back();
            int px = int(p % w), py = int(p / w);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (connectivity == 4 && dx != 0 && dy != 0) continue;
                    int qx = px + dx, qy = py + dy;
                    if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
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
    return label;
}

}  // namespace

TEST_CASE("clahe: constant image stays constant") {
    GrayImage img(32, 32, 8, 128);
    GrayImage out = clahe(img, 4, 4, 0.5, 64);
    CHECK(out.width() == 32);
    CHECK(out.depth() == 8);
    uint16_t first = out.at(0, 0);
    for (auto v : out.data()) CHECK(v == first);
}

TEST_CASE("clahe: single tile with clip 1 equals plain histogram equalization") {
    std::mt19937_64 rng(42);
    GrayImage img = testutil::random_image(40, 30, rng);
    GrayImage out = clahe(img, 1, 1, 1.0, 256);
    auto map = reference_equalization_map(img.data(), 256, 256, 1.0);
    for (size_t i = 0; i < img.size(); ++i) CHECK(out.data()[i] == map[img.data()[i]]);
}

TEST_CASE("clahe: two-tile image matches per-tile oracle with interpolation") {
    // Left half: dark ramp; right half: bright ramp.
    const int w = 64, h = 16;
    GrayImage img(w, h, 8);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = x < w / 2 ? uint16_t(10 + (x * 3 + y) % 60) : uint16_t(150 + (x + y * 2) % 90);

    const int bins = 64;
    const double clip = 0.25;
    GrayImage out = clahe(img, 2, 1, clip, bins);

    std::vector<uint16_t> left, right;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) (x < w / 2 ? left : right).push_back(img.at(x, y));
    auto map_l = reference_equalization_map(left, 256, bins, clip);
    auto map_r = reference_equalization_map(right, 256, bins, clip);

    const double cx_l = 0.5 * (0 + w / 2 - 1);          // left tile center
    const double cx_r = 0.5 * (w / 2 + w - 1);          // right tile center
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int b = int(img.at(x, y)) * bins / 256;
            double fx = x <= cx_l ? 0.0 : (x >= cx_r ? 1.0 : (x - cx_l) / (cx_r - cx_l));
            long expect = std::lround((1 - fx) * map_l[b] + fx * map_r[b]);
            CHECK(long(out.at(x, y)) == expect);
        }
    }
}

TEST_CASE("clahe: per-tile mapping is monotone in intensity") {
    std::mt19937_64 rng(7);
    GrayImage img = testutil::random_image(64, 64, rng);
    GrayImage out = clahe(img, 1, 1, 0.1, 64);
    // One tile: the mapping is directly observable pixelwise.
    std::vector<int> mapped(256, -1);
    for (size_t i = 0; i < img.size(); ++i) mapped[img.data()[i]] = out.data()[i];
    int prev = -1;
    for (int v = 0; v < 256; ++v) {
        if (mapped[v] < 0) continue;
        CHECK(mapped[v] >= prev);
        prev = mapped[v];
    }
}

TEST_CASE("clahe: parameter validation") {
    GrayImage img(8, 8, 8, 1);
    CHECK_THROWS_AS(clahe(img, 0, 1, 0.5, 64), ParameterError);
    CHECK_THROWS_AS(clahe(img, 1, 1, 0.0, 64), ParameterError);
    CHECK_THROWS_AS(clahe(img, 1, 1, 1.5, 64), ParameterError);
    CHECK_THROWS_AS(clahe(img, 1, 1, 0.5, 1), ParameterError);
    CHECK_THROWS_AS(clahe(img, 16, 1, 0.5, 64), ParameterError);
}

TEST_CASE("clahe: 16-bit input keeps depth") {
    std::mt19937_64 rng(3);
    GrayImage img = testutil::random_image(32, 32, rng, 16);
    GrayImage out = clahe(img, 2, 2, 0.5, 128);
    CHECK(out.depth() == 16);
    for (auto v : out.data()) CHECK(v <= 65535);
}

TEST_CASE("local_entropy: constant window is zero") {
    GrayImage img(16, 16, 8, 77);
    BinaryMask all(16, 16, true);
    EntropyMap e = local_entropy(img, all, 5, 64);
    for (double v : e.data()) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("local_entropy: uniformly occupied bins reach log2(bins)") {
    // 3x3 window, 9 bins, each bin hit exactly once -> log2(9) bits, the
    // uniform-distribution ceiling.
    const int bins = 9;
    GrayImage img(3, 3, 8);
    for (int i = 0; i < 9; ++i) img.data()[i] = uint16_t(i * 256 / bins + 1);
    BinaryMask all(3, 3, true);
    EntropyMap e = local_entropy(img, all, 3, bins);
    CHECK(e.at(1, 1) == doctest::Approx(std::log2(9.0)).epsilon(1e-12));
}

TEST_CASE("local_entropy: matches direct histogram oracle on a 9x9 window") {
    std::mt19937_64 rng(11);
    GrayImage img = testutil::random_image(32, 32, rng);
    BinaryMask all(32, 32, true);
    const int window = 9, bins = 64;
    EntropyMap e = local_entropy(img, all, window, bins);

    auto oracle = [&](int x, int y) {
        std::vector<int> hist(bins, 0);
        for (int dy = -4; dy <= 4; ++dy)
            for (int dx = -4; dx <= 4; ++dx) {
                int sx = std::clamp(x + dx, 0, 31), sy = std::clamp(y + dy, 0, 31);
                ++hist[int(img.at(sx, sy)) * bins / 256];
            }
        double hsum = 0;
        for (int c : hist) {
            if (!c) continue;
            double p = c / 81.0;
            hsum -= p * std::log2(p);
        }
        return hsum;
    };
    for (int y = 0; y < 32; y += 5)
        for (int x = 0; x < 32; x += 5) CHECK(e.at(x, y) == doctest::Approx(oracle(x, y)).epsilon(1e-12));
}

TEST_CASE("local_entropy: zero outside mask, bounded by log2(bins)") {
    std::mt19937_64 rng(13);
    GrayImage img = testutil::random_image(24, 24, rng);
    BinaryMask mask = random_mask(24, 24, 0.5, rng);
    EntropyMap e = local_entropy(img, mask, 5, 32);
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x) {
            if (!mask.at(x, y)) CHECK(e.at(x, y) == 0.0);
            CHECK(e.at(x, y) <= std::log2(32.0) + 1e-12);
        }
}

TEST_CASE("local_entropy: window larger than image") {
    GrayImage img(8, 8, 8, 0);
    BinaryMask all(8, 8, true);
    CHECK_THROWS_AS(local_entropy(img, all, 9, 16), ParameterError);
    CHECK_THROWS_AS(local_entropy(img, all, 4, 16), ParameterError);
}

TEST_CASE("largest_component: keeps the bigger blob") {
    BinaryMask m(16, 8);
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 2; ++y) m.set(x, y, true);  // area 10
    for (int x = 10; x < 13; ++x) m.set(x, 6, true);    // area 3
    BinaryMask out = largest_component(m, 8);
    CHECK(out.count() == 10);
    CHECK(out.at(0, 0));
    CHECK(!out.at(10, 6));
}

TEST_CASE("largest_component: empty stays empty") {
    BinaryMask m(8, 8);
    CHECK(largest_component(m, 4).count() == 0);
}

TEST_CASE("largest_component: equals flood-fill oracle on random masks") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        BinaryMask m = random_mask(64, 64, 0.45, rng);
        for (int connectivity : {4, 8}) {
            auto labels = flood_labels(m, connectivity);
            int ncomp = 1 + *std::max_element(labels.begin(), labels.end());
            std::vector<long> area(std::max(ncomp, 1), 0);
            std::vector<size_t> first(std::max(ncomp, 1), m.size());
            for (size_t i = 0; i < labels.size(); ++i) {
                if (labels[i] < 0) continue;
                ++area[labels[i]];
                first[labels[i]] = std::min(first[labels[i]], i);
            }
            int best = 0;
            for (int c = 1; c < ncomp; ++c)
                if (area[c] > area[best] || (area[c] == area[best] && first[c] < first[best]))
                    best = c;
            BinaryMask out = largest_component(m, connectivity);
            for (size_t i = 0; i < m.size(); ++i)
                CHECK(bool(out.data()[i]) == (labels[i] == best));
            // Output is a connected subset of the input.
            auto out_labels = flood_labels(out, connectivity);
            int out_comp = out.count() ? 1 + *std::max_element(out_labels.begin(), out_labels.end()) : 0;
            CHECK(out_comp <= 1);
        }
    }
}

TEST_CASE("fill_holes: hollow ring becomes a disk") {
    BinaryMask m(9, 9);
    for (int t = 0; t < 9; ++t) {
        m.set(t, 2, true);
        m.set(t, 6, true);
    }
    for (int y = 2; y <= 6; ++y) {
        m.set(0, y, true);
        m.set(8, y, true);
    }
    BinaryMask out = fill_holes(m);
    for (int y = 2; y <= 6; ++y)
        for (int x = 0; x < 9; ++x) CHECK(out.at(x, y));
    CHECK(!out.at(4, 0));
}

TEST_CASE("fill_holes: no enclosed background is the identity") {
    BinaryMask m(8, 8);
    for (int x = 0; x < 8; ++x) m.set(x, 3, true);
    CHECK(fill_holes(m) == m);
}

TEST_CASE("fill_holes: matches border flood oracle; idempotent") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        BinaryMask m = random_mask(48, 48, 0.4, rng);
        // Oracle: BFS over background from border cells, 4-connected.
        std::vector<char> outside(m.size(), 0);
        std::vector<size_t> q;
        auto push = [&](int x, int y) {
            size_t i = size_t(y) * 48 + x;
            if (!m.data()[i] && !outside[i]) {
                outside[i] = 1;
                q.push_back(i);
            }
        };
        for (int t = 0; t < 48; ++t) {
            push(t, 0);
            push(t, 47);
            push(0, t);
            push(47, t);
        }
        for (size_t k = 0; k < q.size(); ++k) {
            int x = int(q[k] % 48), y = int(q[k] / 48);
            if (x > 0) push(x - 1, y);
            if (x < 47) push(x + 1, y);
            if (y > 0) push(x, y - 1);
            if (y < 47) push(x, y + 1);
        }
        BinaryMask out = fill_holes(m);
        for (size_t i = 0; i < m.size(); ++i)
            CHECK(bool(out.data()[i]) == (m.data()[i] || !outside[i]));
        CHECK(fill_holes(out) == out);
    }
}

TEST_CASE("dilate: radius 0 is identity; single pixel grows to a disk") {
    std::mt19937_64 rng(23);
    BinaryMask m = random_mask(16, 16, 0.3, rng);
    CHECK(dilate(m, 0) == m);

    BinaryMask dot(7, 7);
    dot.set(3, 3, true);
    BinaryMask out = dilate(dot, 1);
    // Euclidean disk of radius 1: the 4-neighborhood plus the center.
    CHECK(out.count() == 5);
    CHECK(out.at(3, 2));
    CHECK(out.at(2, 3));
    CHECK(!out.at(2, 2));
}

TEST_CASE("dilate: equals per-pixel max-over-disk oracle; extensive and monotone") {
    std::mt19937_64 rng(29);
    BinaryMask m = random_mask(32, 32, 0.15, rng);
    for (int radius : {1, 2, 3}) {
        BinaryMask out = dilate(m, radius);
        for (int y = 0; y < 32; ++y) {
            for (int x = 0; x < 32; ++x) {
                bool expect = false;
                for (int dy = -radius; dy <= radius && !expect; ++dy)
                    for (int dx = -radius; dx <= radius && !expect; ++dx) {
                        if (dx * dx + dy * dy > radius * radius) continue;
                        int sx = x + dx, sy = y + dy;
                        if (sx >= 0 && sy >= 0 && sx < 32 && sy < 32 && m.at(sx, sy)) expect = true;
                    }
                CHECK(out.at(x, y) == expect);
                if (m.at(x, y)) CHECK(out.at(x, y));  // extensive
            }
        }
    }
    // Monotone in radius.
    BinaryMask d1 = dilate(m, 1), d2 = dilate(m, 2);
    for (size_t i = 0; i < m.size(); ++i)
        if (d1.data()[i]) CHECK(d2.data()[i]);
}
