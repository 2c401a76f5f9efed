#pragma once

#include <Eigen/Dense>

#include "vrec/affine.hpp"

namespace vrec {

/// Stereo X-ray rig: two sources at (+-a, 0, source_height) above the
/// detector plane, intrinsics M mapping world detector coordinates to pixels.
struct StereoGeometry {
    double source_height = 1000.0;  // hx, world units above the detector
    double half_baseline = 50.0;    // a; sources sit at x = -a and x = +a
    Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();  // M

    /// Paper-literal depth variant keeps the stray "-1" in the z component.
    bool eq5_minus_one = false;
    /// Scale lateral coordinates by z / hx (sample plane instead of detector
    /// plane). Off by default.
    bool magnification_correction = false;
    /// Measure disparity on the x component only instead of the full
    /// Euclidean distance (for pure x-baseline rigs).
    bool disparity_x_only = false;

    void validate() const;
};

struct Point3D {
    double x = 0, y = 0, z = 0;
};

/// Pixel -> world detector coordinates through M^-1 with perspective
/// normalization. Throws GeometryError for singular intrinsics.
Point2 to_world(const Eigen::Matrix3d& intrinsics, const Point2& pixel);

/// Depth from disparity (both in world units): z = 2a*hx / (d + 2a),
/// strictly decreasing in d with z = hx at d = 0. Negative d throws.
double depth_from_disparity(const StereoGeometry& g, double disparity);

/// Midpoint + depth triangulation of a correspondence given in world
/// detector coordinates.
Point3D triangulate(const StereoGeometry& g, const Point2& pa_world, const Point2& pb_world);

}  // namespace vrec
