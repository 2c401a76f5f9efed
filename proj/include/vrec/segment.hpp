#pragma once

#include <optional>
#include <vector>

#include "vrec/image.hpp"
#include "vrec/raster_ops.hpp"

namespace vrec {

struct MrfParams {
    int label_count = 4;       // K
    double beta_potts = 1.5;   // Potts smoothness weight, >= 0
    int max_sweeps = 20;
    uint64_t init_seed = 1;

    void validate() const;
};

/// Per-label Gaussian intensity statistics, frozen after k-means init.
struct MrfModel {
    std::vector<double> mu;
    std::vector<double> sigma;
    double beta_potts = 0.0;
};

/// K-means (k-means++ seeded by init_seed, Lloyd to convergence) over the
/// intensity histogram; sigma is floored at 0.5 levels so constant clusters
/// stay usable. Throws if K exceeds the number of distinct intensities.
MrfModel fit_mrf_model(const GrayImage& img, const MrfParams& params);

/// Energy of a labeling: sum_p -log N(I_p; mu_l, sigma_l)
/// + beta * #{4-neighbor pairs with different labels}.
double mrf_energy(const GrayImage& img, const LabelMap& labels, const MrfModel& model);

/// MAP-style segmentation: maximum-likelihood init from the k-means model,
/// then ICM sweeps in raster order until no pixel changes or max_sweeps.
/// Energy is non-increasing across sweeps; per-sweep energies (including the
/// initial labeling's) are reported through sweep_energies when given.
LabelMap mrf_segment(const GrayImage& img, const MrfParams& params,
                     std::vector<double>* sweep_energies = nullptr);

/// Modal label among the top_fraction brightest pixels of the raw image
/// (intensity ties at the cutoff resolved by pixel index, vote ties by
/// smaller label id).
int select_vessel_label(const GrayImage& raw, const LabelMap& labels, double top_fraction);

/// Remove mask pixels whose local entropy (computed on the raw image over the
/// mask) is >= threshold bits. Output is a subset of the input mask.
BinaryMask entropy_filter(const GrayImage& raw, const BinaryMask& mask, int window, int bins,
                          double threshold_bits);

struct SegmentConfig {
    int clahe_tiles_x = 8;
    int clahe_tiles_y = 8;
    double clahe_clip = 0.04;
    int clahe_bins = 256;
    MrfParams mrf;
    double vessel_top_fraction = 0.01;
    int entropy_window = 9;
    int entropy_bins = 64;
    double entropy_threshold_bits = 4.5;
    int dilate_radius = 2;
    int connectivity = 8;

    void validate() const;
};

/// Full vessel segmentation: clahe -> mrf_segment -> select_vessel_label ->
/// mask extraction -> entropy_filter -> largest_component -> dilate ->
/// fill_holes. Stage failures are rethrown with the stage name prefixed.
/// label_map_out, when given, receives the intermediate MRF labeling.
BinaryMask segment_pipeline(const GrayImage& raw, const SegmentConfig& config,
                            LabelMap* label_map_out = nullptr);

}  // namespace vrec
