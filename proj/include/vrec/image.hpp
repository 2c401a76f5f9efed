#pragma once

#include <cstdint>
#include <vector>

#include "vrec/errors.hpp"

namespace vrec {

/// Single-channel raster of 8- or 16-bit intensities, row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, int depth_bits = 8, uint16_t fill = 0)
        : width_(width), height_(height), depth_(depth_bits),
          data_(static_cast<size_t>(width) * height, fill) {
        if (width <= 0 || height <= 0)
            throw ParameterError("GrayImage: dimensions must be positive");
        if (depth_bits != 8 && depth_bits != 16)
            throw ParameterError("GrayImage: depth must be 8 or 16 bits");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int depth() const { return depth_; }
    /// Number of representable intensity levels, 2^depth.
    int levels() const { return 1 << depth_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    uint16_t at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }
    uint16_t& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    const std::vector<uint16_t>& data() const { return data_; }
    std::vector<uint16_t>& data() { return data_; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    int depth_ = 8;
    std::vector<uint16_t> data_;
};

/// Per-pixel boolean mask. Stored as 0/1 bytes; serialized as {0,255}.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          data_(static_cast<size_t>(width) * height, fill ? 1 : 0) {
        if (width <= 0 || height <= 0)
            throw ParameterError("BinaryMask: dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { data_[static_cast<size_t>(y) * width_ + x] = v ? 1 : 0; }
    const std::vector<uint8_t>& data() const { return data_; }
    std::vector<uint8_t>& data() { return data_; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    size_t count() const {
        size_t n = 0;
        for (uint8_t v : data_) n += v != 0;
        return n;
    }

    bool operator==(const BinaryMask& o) const {
        return width_ == o.width_ && height_ == o.height_ && data_ == o.data_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<uint8_t> data_;
};

/// Per-pixel local Shannon entropy in bits; 0 outside the evaluation mask.
class EntropyMap {
public:
    EntropyMap() = default;
    EntropyMap(int width, int height)
        : width_(width), height_(height), data_(static_cast<size_t>(width) * height, 0.0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    double at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }
    double& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    const std::vector<double>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Dense per-pixel label ids in 0..K-1.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(int width, int height, int label_count)
        : width_(width), height_(height), k_(label_count),
          data_(static_cast<size_t>(width) * height, 0) {
        if (label_count < 2 || label_count > 16)
            throw ParameterError("LabelMap: label count must be in [2,16]");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int label_count() const { return k_; }
    uint8_t at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }
    uint8_t& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    const std::vector<uint8_t>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    int k_ = 0;
    std::vector<uint8_t> data_;
};

}  // namespace vrec
