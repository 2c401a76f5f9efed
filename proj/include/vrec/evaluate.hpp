#pragma once

#include <map>
#include <string>
#include <vector>

#include "vrec/tree.hpp"

namespace vrec {

struct EvalPoint {
    int id = 0;          // reconstructed point id
    int gt_id = 0;       // associated ground-truth point id
    double distance_2d = 0;
    double depth = 0;    // possibly normalized
    double gt_depth = 0;
    double error = 0;    // |depth - gt| / gt
};

struct Histogram {
    double bin_width = 0.1;
    std::vector<long> counts;              // [k*w, (k+1)*w)
    std::vector<double> cumulative_fraction;
};

struct ErrorReport {
    std::vector<EvalPoint> per_point;
    double rms_error = 0;
    std::map<double, double> fraction_under;  // threshold -> fraction
    Histogram histogram;
    int excluded = 0;  // non-positive ground-truth depths after normalization
};

struct LabeledPoint {
    int id = 0;
    double x = 0, y = 0, z = 0;
};

/// Pair every reconstructed point with its nearest ground-truth point in
/// (x, y); many-to-one is allowed, ties go to the smaller ground-truth index.
std::vector<std::pair<int, int>> associate(const std::vector<LabeledPoint>& points,
                                           const std::vector<LabeledPoint>& gt);

struct EvalParams {
    bool normalize = true;  // divide each set's depths by its own max
    std::vector<double> thresholds = {0.10, 0.20, 0.30, 0.50};
    double histogram_bin_width = 0.05;
};

/// Per-point relative depth error e = |depth - gt| / gt over associated
/// pairs, aggregated as rms = sqrt(sum e^2 / n), with fraction-under
/// thresholds and the error histogram.
ErrorReport depth_error(const std::vector<LabeledPoint>& points,
                        const std::vector<LabeledPoint>& gt,
                        const std::vector<std::pair<int, int>>& pairs, const EvalParams& params);

/// Histogram of errors with the given bin width plus cumulative fractions.
Histogram error_histogram(const std::vector<double>& errors, double bin_width);

/// CSV: "bin_start,bin_end,count,cumulative_fraction" rows.
std::string histogram_csv(const Histogram& hist);
/// CSV: "id,gt_id,distance2d,depth,gt_depth,error" rows.
std::string report_csv(const ErrorReport& report);
/// Short human-readable summary.
std::string report_summary(const ErrorReport& report);

std::vector<LabeledPoint> tree_points(const VesselTree& tree3d);

}  // namespace vrec
