#pragma once

#include "vrec/image.hpp"

namespace vrec {

/// Contrast-limited adaptive histogram equalization.
///
/// The image is split into an nx-by-ny tile grid (last tiles absorb the
/// remainder). Each tile's histogram is taken over `bins` equal-width bins of
/// the full intensity range, clipped at clip_limit * tile_pixel_count, and the
/// clipped excess is redistributed uniformly over all bins, iterating until
/// the residual is below one count per bin. The per-tile mapping is
///     m(b) = round(cdf(b) / tile_pixels * (levels - 1))
/// and each output pixel bilinearly interpolates the mappings of the four
/// nearest tile centers (clamped at the borders). clip_limit = 1 disables
/// clipping, so a single tile reduces to plain global histogram equalization.
GrayImage clahe(const GrayImage& img, int tiles_x, int tiles_y, double clip_limit, int bins);

/// Local Shannon entropy (bits) of the windowed intensity histogram, with
/// `bins` equal-width bins and clamped (index-replicated) borders. Evaluated
/// only where mask is true; 0 elsewhere. window must be odd, >= 3, and no
/// larger than either image dimension.
EntropyMap local_entropy(const GrayImage& img, const BinaryMask& mask, int window, int bins);

/// Keep only the maximum-area connected component (4- or 8-connectivity).
/// Area ties are broken in favor of the component containing the smallest
/// row-major pixel index. An empty mask stays empty.
BinaryMask largest_component(const BinaryMask& mask, int connectivity = 8);

/// Fill background regions not connected to the image border (4-connected
/// background flood). Foreground pixels are never changed.
BinaryMask fill_holes(const BinaryMask& mask);

/// Minkowski dilation by a Euclidean disk: pixel offsets with
/// dx^2 + dy^2 <= radius^2. radius 0 is the identity.
BinaryMask dilate(const BinaryMask& mask, int radius);

}  // namespace vrec
