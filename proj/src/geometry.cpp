#include "vrec/geometry.hpp"

#include <cmath>

#include "vrec/errors.hpp"

namespace vrec {

void StereoGeometry::validate() const {
    if (!(source_height > 0)) throw GeometryError("geometry: source height hx must be > 0");
    if (!(half_baseline > 0)) throw GeometryError("geometry: half-baseline a must be > 0");
    if (std::abs(intrinsics.determinant()) < 1e-12)
        throw GeometryError("geometry: intrinsic matrix is singular");
}

Point2 to_world(const Eigen::Matrix3d& intrinsics, const Point2& pixel) {
    if (std::abs(intrinsics.determinant()) < 1e-12)
        throw GeometryError("to_world: intrinsic matrix is singular");
    Eigen::Vector3d w = intrinsics.inverse() * Eigen::Vector3d(pixel.x(), pixel.y(), 1.0);
    if (std::abs(w.z()) < 1e-15) throw GeometryError("to_world: point at infinity");
    return {w.x() / w.z(), w.y() / w.z()};
}

double depth_from_disparity(const StereoGeometry& g, double disparity) {
    if (disparity < 0) throw GeometryError("depth_from_disparity: negative disparity");
    double z = 2.0 * g.half_baseline * g.source_height / (disparity + 2.0 * g.half_baseline);
    if (g.eq5_minus_one) z -= 1.0;
    return z;
}

Point3D triangulate(const StereoGeometry& g, const Point2& pa_world, const Point2& pb_world) {
    double d = g.disparity_x_only ? std::abs(pa_world.x() - pb_world.x())
                                  : (pa_world - pb_world).norm();
    Point3D p;
    p.z = depth_from_disparity(g, d);
    Point2 mid = 0.5 * (pa_world + pb_world);
    double s = g.magnification_correction ? p.z / g.source_height : 1.0;
    p.x = mid.x() * s;
    p.y = mid.y() * s;
    return p;
}

}  // namespace vrec
