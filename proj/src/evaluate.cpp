#include "vrec/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "vrec/errors.hpp"
#include "vrec/log.hpp"

namespace vrec {

std::vector<std::pair<int, int>> associate(const std::vector<LabeledPoint>& points,
                                           const std::vector<LabeledPoint>& gt) {
    if (points.empty() || gt.empty()) throw ParameterError("associate: empty point set");
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(points.size());
    for (const LabeledPoint& p : points) {
        double best = std::numeric_limits<double>::max();
        int best_id = gt.front().id;
        for (const LabeledPoint& g : gt) {
            double d = (p.x - g.x) * (p.x - g.x) + (p.y - g.y) * (p.y - g.y);
            if (d < best) {  // strict: ties keep the earlier (smaller) index
                best = d;
                best_id = g.id;
            }
        }
        pairs.emplace_back(p.id, best_id);
    }
    return pairs;
}

Histogram error_histogram(const std::vector<double>& errors, double bin_width) {
    if (!(bin_width > 0)) throw ParameterError("error_histogram: bin width must be > 0");
    Histogram h;
    h.bin_width = bin_width;
    for (double e : errors) {
        int bin = static_cast<int>(std::floor(e / bin_width));
        if (bin >= static_cast<int>(h.counts.size())) h.counts.resize(bin + 1, 0);
        ++h.counts[bin];
    }
    long acc = 0;
    h.cumulative_fraction.resize(h.counts.size());
    for (size_t i = 0; i < h.counts.size(); ++i) {
        acc += h.counts[i];
        h.cumulative_fraction[i] = errors.empty() ? 0.0 : static_cast<double>(acc) / errors.size();
    }
    return h;
}

ErrorReport depth_error(const std::vector<LabeledPoint>& points,
                        const std::vector<LabeledPoint>& gt,
                        const std::vector<std::pair<int, int>>& pairs, const EvalParams& params) {
    std::unordered_map<int, const LabeledPoint*> by_id, gt_by_id;
    for (const auto& p : points) by_id[p.id] = &p;
    for (const auto& g : gt) gt_by_id[g.id] = &g;

    double max_depth = 0, max_gt = 0;
    for (const auto& p : points) max_depth = std::max(max_depth, p.z);
    for (const auto& g : gt) max_gt = std::max(max_gt, g.z);
    const double scale_p = params.normalize && max_depth > 0 ? 1.0 / max_depth : 1.0;
    const double scale_g = params.normalize && max_gt > 0 ? 1.0 / max_gt : 1.0;

    ErrorReport report;
    double sum_sq = 0;
    std::vector<double> errors;
    for (auto [pid, gid] : pairs) {
        const LabeledPoint* p = by_id.at(pid);
        const LabeledPoint* g = gt_by_id.at(gid);
        EvalPoint ep;
        ep.id = pid;
        ep.gt_id = gid;
        ep.distance_2d = std::hypot(p->x - g->x, p->y - g->y);
        ep.depth = p->z * scale_p;
        ep.gt_depth = g->z * scale_g;
        if (!(ep.gt_depth > 0)) {
            ++report.excluded;
            continue;
        }
        ep.error = std::abs(ep.depth - ep.gt_depth) / ep.gt_depth;
        sum_sq += ep.error * ep.error;
        errors.push_back(ep.error);
        report.per_point.push_back(ep);
    }
    if (report.excluded > 0)
        log::warn("depth_error: excluded " + std::to_string(report.excluded) +
                  " pair(s) with non-positive ground-truth depth");
    const size_t n = report.per_point.size();
    report.rms_error = n ? std::sqrt(sum_sq / n) : 0.0;
    for (double t : params.thresholds) {
        long under = std::count_if(errors.begin(), errors.end(), [&](double e) { return e < t; });
        report.fraction_under[t] = n ? static_cast<double>(under) / n : 0.0;
    }
    report.histogram = error_histogram(errors, params.histogram_bin_width);
    return report;
}

std::string histogram_csv(const Histogram& hist) {
    std::ostringstream out;
    out << "bin_start,bin_end,count,cumulative_fraction\n";
    char buf[128];
    for (size_t i = 0; i < hist.counts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%ld,%.6f\n", i * hist.bin_width,
                      (i + 1) * hist.bin_width, hist.counts[i], hist.cumulative_fraction[i]);
        out << buf;
    }
    return out.str();
}

std::string report_csv(const ErrorReport& report) {
    std::ostringstream out;
    out << "id,gt_id,distance2d,depth,gt_depth,error\n";
    char buf[160];
    for (const EvalPoint& p : report.per_point) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.6g,%.10g,%.10g,%.10g\n", p.id, p.gt_id,
                      p.distance_2d, p.depth, p.gt_depth, p.error);
        out << buf;
    }
    return out.str();
}

std::string report_summary(const ErrorReport& report) {
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "points: %zu  rms relative depth error: %.4f\n",
                  report.per_point.size(), report.rms_error);
    out << buf;
    for (auto [t, f] : report.fraction_under) {
        std::snprintf(buf, sizeof buf, "  under %3.0f%% error: %.1f%%\n", t * 100, f * 100);
        out << buf;
    }
    if (report.excluded > 0) out << "  excluded pairs: " << report.excluded << "\n";
    return out.str();
}

std::vector<LabeledPoint> tree_points(const VesselTree& tree3d) {
    std::vector<LabeledPoint> out;
    out.reserve(tree3d.nodes.size());
    for (const VesselNode& n : tree3d.nodes) out.push_back({n.id, n.x, n.y, n.z});
    return out;
}

}  // namespace vrec
