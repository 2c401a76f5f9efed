#pragma once

#include <string>

#include "vrec/tree.hpp"

namespace vrec {

struct TriangleMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> faces;  // 0-based vertex indexes
};

/// Render each parent-child segment as a closed cylinder with a
/// ring_segments-gon cross-section (radius = mean of the endpoint radii):
/// 2*ring_segments rim vertices plus two cap centers, 2*ring_segments side
/// and 2*ring_segments cap triangles per segment. Zero-length or zero-radius
/// segments are skipped with a warning.
TriangleMesh mesh_from_tree(const VesselTree& tree3d, int ring_segments);

/// Wavefront OBJ text: v lines then f lines, 1-indexed.
std::string obj_write(const TriangleMesh& mesh, const std::string& header_comment = "");
void obj_save(const TriangleMesh& mesh, const std::string& path,
              const std::string& header_comment = "");

}  // namespace vrec
