#include "vrec/affine.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vrec/errors.hpp"
#include "vrec/log.hpp"

namespace vrec {

Affine2D::Affine2D(const Eigen::Matrix3d& m) : m_(m) {
    if (m(2, 0) != 0.0 || m(2, 1) != 0.0 || m(2, 2) != 1.0)
        throw ParameterError("Affine2D: bottom row must be (0,0,1)");
    if (std::abs(m.topLeftCorner<2, 2>().determinant()) < 1e-12)
        throw ParameterError("Affine2D: singular linear part");
}

Affine2D Affine2D::translation(double tx, double ty) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 2) = tx;
    m(1, 2) = ty;
    return Affine2D(m);
}

Affine2D Affine2D::from_parts(const Eigen::Matrix2d& linear, const Eigen::Vector2d& t) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m.topLeftCorner<2, 2>() = linear;
    m.topRightCorner<2, 1>() = t;
    return Affine2D(m);
}

std::array<double, 9> Affine2D::row_major() const {
    std::array<double, 9> v;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) v[r * 3 + c] = m_(r, c);
    return v;
}

Affine2D Affine2D::from_row_major(const std::array<double, 9>& v) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = v[r * 3 + c];
    return Affine2D(m);
}

Point2 apply_affine(const Affine2D& a, const Point2& p) {
    Eigen::Vector3d q = a.matrix() * Eigen::Vector3d(p.x(), p.y(), 1.0);
    return {q.x(), q.y()};
}

AffineFit estimate_affine(const std::vector<std::pair<Point2, Point2>>& pairs) {
    const int n = static_cast<int>(pairs.size());
    if (n < 3) throw ConditioningError("estimate_affine: need >= 3 point pairs");

    // Rows [px py 1] shared by the x and y component fits.
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd bx(n), by(n);
    for (int i = 0; i < n; ++i) {
        design(i, 0) = pairs[i].first.x();
        design(i, 1) = pairs[i].first.y();
        design(i, 2) = 1.0;
        bx(i) = pairs[i].second.x();
        by(i) = pairs[i].second.y();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < 3)
        throw ConditioningError("estimate_affine: collinear or degenerate point pairs");
    Eigen::Vector3d rx = svd.solve(bx);
    Eigen::Vector3d ry = svd.solve(by);

    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m.row(0) << rx(0), rx(1), rx(2);
    m.row(1) << ry(0), ry(1), ry(2);

    AffineFit fit{Affine2D(m), 0.0};
    double ss = 0.0;
    for (const auto& [p, q] : pairs) {
        Point2 r = apply_affine(fit.transform, p) - q;
        ss += r.squaredNorm();
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

namespace {

// NCC of the overlap of a shifted by (dx, dy) against b, on a subsampled grid.
double ncc_at_shift(const GrayImage& a, const GrayImage& b, int dx, int dy, int step) {
    int x0 = std::max(0, -dx), x1 = std::min(a.width(), b.width() - dx);
    int y0 = std::max(0, -dy), y1 = std::min(a.height(), b.height() - dy);
    if (x1 - x0 < 8 || y1 - y0 < 8) return -2.0;
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    long n = 0;
    for (int y = y0; y < y1; y += step) {
        for (int x = x0; x < x1; x += step) {
            double va = a.at(x, y);
            double vb = b.at(x + dx, y + dy);
            sa += va;
            sb += vb;
            saa += va * va;
            sbb += vb * vb;
            sab += va * vb;
            ++n;
        }
    }
    double cov = sab - sa * sb / n;
    double var_a = saa - sa * sa / n;
    double var_b = sbb - sb * sb / n;
    if (var_a <= 0 || var_b <= 0) return -2.0;
    return cov / std::sqrt(var_a * var_b);
}

}  // namespace

Affine2D estimate_translation_ncc(const GrayImage& a, const GrayImage& b, int range, int stride) {
    if (range < 1) throw ParameterError("estimate_translation_ncc: range must be >= 1");
    if (stride < 1) stride = 1;
    const int pix_step = std::max(1, std::min(a.width(), a.height()) / 256);

    int best_dx = 0, best_dy = 0;
    double best = -2.0;
    for (int dy = -range; dy <= range; dy += stride) {
        for (int dx = -range; dx <= range; dx += stride) {
            double s = ncc_at_shift(a, b, dx, dy, pix_step);
            if (s > best) {
                best = s;
                best_dx = dx;
                best_dy = dy;
            }
        }
    }
    for (int dy = best_dy - stride + 1; dy <= best_dy + stride - 1; ++dy) {
        for (int dx = best_dx - stride + 1; dx <= best_dx + stride - 1; ++dx) {
            if (std::abs(dx) > range || std::abs(dy) > range) continue;
            double s = ncc_at_shift(a, b, dx, dy, pix_step);
            if (s > best) {
                best = s;
                best_dx = dx;
                best_dy = dy;
            }
        }
    }
    if (best <= -2.0)
        throw MatchError("estimate_translation_ncc: no shift with usable overlap");
    log::info("translation estimate: (" + std::to_string(best_dx) + ", " + std::to_string(best_dy) +
              "), ncc " + std::to_string(best));
    return Affine2D::translation(best_dx, best_dy);
}

std::vector<std::pair<Point2, Point2>> load_point_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<std::pair<Point2, Point2>> pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line);
        double xa, ya, xb, yb;
        if (!(fields >> xa >> ya >> xb >> yb))
            throw ParseError("point pairs: expected 'xA yA xB yB'", line_no);
        pairs.emplace_back(Point2(xa, ya), Point2(xb, yb));
    }
    return pairs;
}

}  // namespace vrec
