#pragma once

#include <random>
#include <vector>

#include "vrec/image.hpp"
#include "vrec/raster_ops.hpp"

namespace testutil {

inline double uniform(std::mt19937_64& rng) {
    return (rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline vrec::GrayImage image_from(int w, int h, const std::vector<int>& values, int depth = 8) {
    vrec::GrayImage img(w, h, depth);
    for (size_t i = 0; i < values.size(); ++i) img.data()[i] = static_cast<uint16_t>(values[i]);
    return img;
}

inline vrec::BinaryMask mask_from(int w, int h, const std::vector<int>& values) {
    vrec::BinaryMask m(w, h);
    for (size_t i = 0; i < values.size(); ++i) m.data()[i] = values[i] ? 1 : 0;
    return m;
}

inline vrec::GrayImage random_image(int w, int h, std::mt19937_64& rng, int depth = 8) {
    vrec::GrayImage img(w, h, depth);
    for (auto& v : img.data()) v = static_cast<uint16_t>(rng() % img.levels());
    return img;
}

inline vrec::BinaryMask random_mask(int w, int h, double density, std::mt19937_64& rng) {
    vrec::BinaryMask m(w, h);
    for (auto& v : m.data()) v = uniform(rng) < density ? 1 : 0;
    return m;
}

// Union of random discs: smooth blobby masks for skeleton tests.
inline vrec::BinaryMask random_blobs(int w, int h, int discs, std::mt19937_64& rng) {
    vrec::BinaryMask m(w, h);
    for (int d = 0; d < discs; ++d) {
        double cx = uniform(rng) * w, cy = uniform(rng) * h;
        double r = 3 + uniform(rng) * (std::min(w, h) / 4.0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
    }
    return m;
}

}  // namespace testutil
