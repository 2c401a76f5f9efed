#pragma once

#include <string>

#include "vrec/image.hpp"

namespace vrec {

/// Load a single-channel 8/16-bit image. Format chosen by file content:
/// PGM (P2/P5) or grayscale PNG. Color inputs are rejected.
GrayImage load_image(const std::string& path);

/// Save as PGM (.pgm) or PNG (.png), chosen by extension. 16-bit images are
/// written losslessly in either format.
void save_image(const GrayImage& img, const std::string& path);

/// Masks travel as 8-bit images with values {0,255}.
BinaryMask load_mask(const std::string& path);
void save_mask(const BinaryMask& mask, const std::string& path);

}  // namespace vrec
