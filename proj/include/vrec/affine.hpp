#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "vrec/image.hpp"

namespace vrec {

using Point2 = Eigen::Vector2d;

/// 2D affine transform in homogeneous form: bottom row fixed to (0, 0, 1),
/// the 2x2 linear part must be non-singular.
class Affine2D {
public:
    Affine2D() : m_(Eigen::Matrix3d::Identity()) {}
    explicit Affine2D(const Eigen::Matrix3d& m);
    static Affine2D translation(double tx, double ty);
    static Affine2D from_parts(const Eigen::Matrix2d& linear, const Eigen::Vector2d& t);

    const Eigen::Matrix3d& matrix() const { return m_; }
    Eigen::Matrix2d linear() const { return m_.topLeftCorner<2, 2>(); }
    Eigen::Vector2d translation_part() const { return m_.topRightCorner<2, 1>(); }

    /// Row-major 9-tuple serialization used by the CLI and config.
    std::array<double, 9> row_major() const;
    static Affine2D from_row_major(const std::array<double, 9>& v);

private:
    Eigen::Matrix3d m_;
};

/// q' = A * (p, 1).
Point2 apply_affine(const Affine2D& a, const Point2& p);

struct AffineFit {
    Affine2D transform;
    double residual_rms = 0.0;
};

/// Least-squares affine minimizing sum ||A p_i - q_i||^2 over >= 3
/// non-collinear point pairs. Collinear or insufficient input raises
/// ConditioningError.
AffineFit estimate_affine(const std::vector<std::pair<Point2, Point2>>& pairs);

/// Translation-only fallback when no feature correspondences are available:
/// exhaustive normalized cross-correlation over integer shifts
/// [-range, range]^2 (coarse stride then +/-(stride-1) refinement), suitable
/// for rigs whose source motion is a pure translation.
Affine2D estimate_translation_ncc(const GrayImage& a, const GrayImage& b, int range,
                                  int stride = 4);

/// Correspondence text files: one "xA yA xB yB" row per pair ('#' comments).
std::vector<std::pair<Point2, Point2>> load_point_pairs(const std::string& path);

}  // namespace vrec
