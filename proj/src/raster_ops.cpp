#include "vrec/raster_ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace vrec {

namespace {

struct Tile {
    int x0, x1, y0, y1;          // pixel bounds, half-open
    double cx, cy;               // tile center
    std::vector<uint16_t> map;   // bin -> output level
};

// Clip histogram at `limit` counts per bin and spread the excess uniformly,
// iterating until less than one count per bin remains to distribute.
void clip_and_redistribute(std::vector<double>& hist, double limit) {
    const int bins = static_cast<int>(hist.size());
    for (;;) {
        double excess = 0.0;
        for (double& h : hist) {
            if (h > limit) {
                excess += h - limit;
                h = limit;
            }
        }
        if (excess <= 0.0) return;
        double share = excess / bins;
        for (double& h : hist) h += share;
        if (excess < bins) return;  // residual below one count per bin
    }
}

}  // namespace

GrayImage clahe(const GrayImage& img, int tiles_x, int tiles_y, double clip_limit, int bins) {
    if (img.empty()) throw ParameterError("clahe: empty image");
    if (tiles_x < 1 || tiles_y < 1) throw ParameterError("clahe: tile grid must be >= 1x1");
    if (!(clip_limit > 0.0 && clip_limit <= 1.0))
        throw ParameterError("clahe: clip_limit must be in (0,1]");
    if (bins < 2) throw ParameterError("clahe: bins must be >= 2");
    if (tiles_x > img.width() || tiles_y > img.height())
        throw ParameterError("clahe: more tiles than pixels");

    const int levels = img.levels();
    const int w = img.width(), h = img.height();
    auto bin_of = [&](uint16_t v) {
        return static_cast<int>(static_cast<int64_t>(v) * bins / levels);
    };

    std::vector<Tile> tiles(static_cast<size_t>(tiles_x) * tiles_y);
    const int tw = w / tiles_x, th = h / tiles_y;
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            Tile& t = tiles[static_cast<size_t>(ty) * tiles_x + tx];
            t.x0 = tx * tw;
            t.x1 = (tx == tiles_x - 1) ? w : (tx + 1) * tw;
            t.y0 = ty * th;
            t.y1 = (ty == tiles_y - 1) ? h : (ty + 1) * th;
            t.cx = 0.5 * (t.x0 + t.x1 - 1);
            t.cy = 0.5 * (t.y0 + t.y1 - 1);

            std::vector<double> hist(bins, 0.0);
            for (int y = t.y0; y < t.y1; ++y)
                for (int x = t.x0; x < t.x1; ++x) hist[bin_of(img.at(x, y))] += 1.0;
            const double area = static_cast<double>(t.x1 - t.x0) * (t.y1 - t.y0);
            clip_and_redistribute(hist, clip_limit * area);

            t.map.resize(bins);
            double cdf = 0.0;
            for (int b = 0; b < bins; ++b) {
                cdf += hist[b];
                double v = cdf / area * (levels - 1);
                t.map[b] = static_cast<uint16_t>(std::lround(std::clamp(v, 0.0, double(levels - 1))));
            }
        }
    }

    // Pixels interpolate bilinearly between the mappings of the four nearest
    // tile centers; outside the center lattice the nearest tile is replicated.
    GrayImage out(w, h, img.depth());
    for (int y = 0; y < h; ++y) {
        int ty0 = 0;
        while (ty0 + 1 < tiles_y && tiles[static_cast<size_t>(ty0 + 1) * tiles_x].cy <= y) ++ty0;
        int ty1 = std::min(ty0 + 1, tiles_y - 1);
        double cy0 = tiles[static_cast<size_t>(ty0) * tiles_x].cy;
        double cy1 = tiles[static_cast<size_t>(ty1) * tiles_x].cy;
        double fy = (y <= cy0) ? 0.0 : (y >= cy1 ? 1.0 : (y - cy0) / (cy1 - cy0));

        for (int x = 0; x < w; ++x) {
            int tx0 = 0;
            while (tx0 + 1 < tiles_x && tiles[static_cast<size_t>(tx0 + 1)].cx <= x) ++tx0;
            int tx1 = std::min(tx0 + 1, tiles_x - 1);
            double cx0 = tiles[static_cast<size_t>(tx0)].cx;
            double cx1 = tiles[static_cast<size_t>(tx1)].cx;
            double fx = (x <= cx0) ? 0.0 : (x >= cx1 ? 1.0 : (x - cx0) / (cx1 - cx0));

            int b = bin_of(img.at(x, y));
            double m00 = tiles[static_cast<size_t>(ty0) * tiles_x + tx0].map[b];
            double m01 = tiles[static_cast<size_t>(ty0) * tiles_x + tx1].map[b];
            double m10 = tiles[static_cast<size_t>(ty1) * tiles_x + tx0].map[b];
            double m11 = tiles[static_cast<size_t>(ty1) * tiles_x + tx1].map[b];
            double v = (1 - fy) * ((1 - fx) * m00 + fx * m01) + fy * ((1 - fx) * m10 + fx * m11);
            out.at(x, y) = static_cast<uint16_t>(std::lround(std::clamp(v, 0.0, double(levels - 1))));
        }
    }
    return out;
}

EntropyMap local_entropy(const GrayImage& img, const BinaryMask& mask, int window, int bins) {
    if (window < 3 || window % 2 == 0) throw ParameterError("local_entropy: window must be odd >= 3");
    if (window > img.width() || window > img.height())
        throw ParameterError("local_entropy: window larger than image");
    if (bins < 2) throw ParameterError("local_entropy: bins must be >= 2");
    if (mask.width() != img.width() || mask.height() != img.height())
        throw ParameterError("local_entropy: mask dimensions mismatch");

    const int levels = img.levels();
    const int r = window / 2;
    const double total = static_cast<double>(window) * window;
    auto bin_of = [&](uint16_t v) {
        return static_cast<int>(static_cast<int64_t>(v) * bins / levels);
    };

    EntropyMap out(img.width(), img.height());
    std::vector<int> hist(bins);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (!mask.at(x, y)) continue;
            std::fill(hist.begin(), hist.end(), 0);
            for (int dy = -r; dy <= r; ++dy) {
                int sy = std::clamp(y + dy, 0, img.height() - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    int sx = std::clamp(x + dx, 0, img.width() - 1);
                    ++hist[bin_of(img.at(sx, sy))];
                }
            }
            double h = 0.0;
            for (int b = 0; b < bins; ++b) {
                if (hist[b] == 0) continue;
                double p = hist[b] / total;
                h -= p * std::log2(p);
            }
            out.at(x, y) = h;
        }
    }
    return out;
}

BinaryMask largest_component(const BinaryMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw ParameterError("largest_component: connectivity must be 4 or 8");
    const int w = mask.width(), h = mask.height();
    if (mask.empty()) return mask;

    static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int ndirs = connectivity == 4 ? 4 : 8;

    std::vector<int32_t> label(mask.size(), -1);
    int best_label = -1;
    size_t best_area = 0;
    size_t best_first = 0;
    int next = 0;
    std::vector<size_t> stack;
    for (size_t i = 0; i < mask.size(); ++i) {
        if (!mask.data()[i] || label[i] >= 0) continue;
        size_t area = 0;
        const size_t first = i;  // smallest row-major index in this component
        stack.assign(1, i);
        label[i] = next;
        while (!stack.empty()) {
            size_t p = stack.back();
            stack.pop_back();
            ++area;
            int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
            for (int d = 0; d < ndirs; ++d) {
                int qx = px + dx8[d], qy = py + dy8[d];
                if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
                size_t q = static_cast<size_t>(qy) * w + qx;
                if (mask.data()[q] && label[q] < 0) {
                    label[q] = next;
                    stack.push_back(q);
                }
            }
        }
        if (area > best_area || (area == best_area && first < best_first)) {
            best_area = area;
            best_label = next;
            best_first = first;
        }
        ++next;
    }

    BinaryMask out(w, h);
    if (best_label >= 0)
        for (size_t i = 0; i < mask.size(); ++i) out.data()[i] = label[i] == best_label ? 1 : 0;
    return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    if (mask.empty()) return mask;
    std::vector<uint8_t> reach(mask.size(), 0);
    std::vector<size_t> stack;
    auto push = [&](int x, int y) {
        size_t i = static_cast<size_t>(y) * w + x;
        if (!mask.data()[i] && !reach[i]) {
            reach[i] = 1;
            stack.push_back(i);
        }
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        size_t p = stack.back();
        stack.pop_back();
        int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
        if (px > 0) push(px - 1, py);
        if (px + 1 < w) push(px + 1, py);
        if (py > 0) push(px, py - 1);
        if (py + 1 < h) push(px, py + 1);
    }
    BinaryMask out(w, h);
    for (size_t i = 0; i < mask.size(); ++i) out.data()[i] = (mask.data()[i] || !reach[i]) ? 1 : 0;
    return out;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
    if (radius < 0) throw ParameterError("dilate: radius must be >= 0");
    if (radius == 0 || mask.empty()) return mask;
    const int w = mask.width(), h = mask.height();

    std::vector<std::pair<int, int>> disk;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) disk.emplace_back(dx, dy);

    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            for (auto [dx, dy] : disk) {
                int qx = x + dx, qy = y + dy;
                if (qx >= 0 && qy >= 0 && qx < w && qy < h) out.set(qx, qy, true);
            }
        }
    }
    return out;
}

}  // namespace vrec
