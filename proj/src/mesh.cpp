#include "vrec/mesh.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "vrec/errors.hpp"
#include "vrec/log.hpp"

namespace vrec {

TriangleMesh mesh_from_tree(const VesselTree& tree3d, int ring_segments) {
    if (ring_segments < 3) throw ParameterError("mesh: ring_segments must be >= 3");
    if (tree3d.dimensionality != 3) throw ParameterError("mesh: tree must be 3D");

    TriangleMesh mesh;
    int skipped = 0;
    std::unordered_map<int, int> idx;
    for (size_t i = 0; i < tree3d.nodes.size(); ++i) idx[tree3d.nodes[i].id] = static_cast<int>(i);

    for (const VesselNode& n : tree3d.nodes) {
        if (n.parent_id == -1) continue;
        const VesselNode& p = tree3d.nodes[idx.at(n.parent_id)];
        Eigen::Vector3d a(p.x, p.y, p.z), b(n.x, n.y, n.z);
        Eigen::Vector3d axis = b - a;
        double len = axis.norm();
        double radius = 0.5 * (p.radius + n.radius);
        if (len < 1e-12 || radius <= 0.0) {
            ++skipped;
            continue;
        }
        axis /= len;
        // Orthonormal frame around the axis; seed with the least-aligned unit
        // vector for stability.
        Eigen::Vector3d seed = std::abs(axis.x()) <= std::abs(axis.y())
                                   ? (std::abs(axis.x()) <= std::abs(axis.z())
                                          ? Eigen::Vector3d::UnitX()
                                          : Eigen::Vector3d::UnitZ())
                                   : (std::abs(axis.y()) <= std::abs(axis.z())
                                          ? Eigen::Vector3d::UnitY()
                                          : Eigen::Vector3d::UnitZ());
        Eigen::Vector3d u = axis.cross(seed).normalized();
        Eigen::Vector3d v = axis.cross(u);

        const int base = static_cast<int>(mesh.vertices.size());
        for (int ring = 0; ring < 2; ++ring) {
            const Eigen::Vector3d& c = ring == 0 ? a : b;
            for (int k = 0; k < ring_segments; ++k) {
                double ang = 2.0 * M_PI * k / ring_segments;
                Eigen::Vector3d q = c + radius * (std::cos(ang) * u + std::sin(ang) * v);
                mesh.vertices.push_back({q.x(), q.y(), q.z()});
            }
        }
        const int cap_a = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back({a.x(), a.y(), a.z()});
        const int cap_b = cap_a + 1;
        mesh.vertices.push_back({b.x(), b.y(), b.z()});

        for (int k = 0; k < ring_segments; ++k) {
            int k1 = (k + 1) % ring_segments;
            int a0 = base + k, a1 = base + k1;
            int b0 = base + ring_segments + k, b1 = base + ring_segments + k1;
            // Side quad split into two triangles, outward winding.
            mesh.faces.push_back({a0, b0, b1});
            mesh.faces.push_back({a0, b1, a1});
            // Caps fan out from the segment endpoints.
            mesh.faces.push_back({cap_a, a1, a0});
            mesh.faces.push_back({cap_b, b0, b1});
        }
    }
    if (skipped > 0)
        log::warn("mesh: skipped " + std::to_string(skipped) +
                  " degenerate segment(s) (zero length or radius)");
    return mesh;
}

std::string obj_write(const TriangleMesh& mesh, const std::string& header_comment) {
    std::ostringstream out;
    if (!header_comment.empty()) {
        std::istringstream lines(header_comment);
        std::string line;
        while (std::getline(lines, line)) out << "# " << line << "\n";
    }
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v[0], v[1], v[2]);
        out << buf;
    }
    for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    return out.str();
}

void obj_save(const TriangleMesh& mesh, const std::string& path,
              const std::string& header_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << obj_write(mesh, header_comment);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace vrec
