#include "vrec/segment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vrec/log.hpp"

namespace vrec {

void MrfParams::validate() const {
    if (label_count < 2 || label_count > 16)
        throw ParameterError("mrf: label count must be in [2,16]");
    if (beta_potts < 0) throw ParameterError("mrf: beta_potts must be >= 0");
    if (max_sweeps < 1) throw ParameterError("mrf: max_sweeps must be >= 1");
}

namespace {

constexpr double kTwoPi = 6.283185307179586;

inline double neg_log_gaussian(double v, double mu, double sigma) {
    double d = (v - mu) / sigma;
    return 0.5 * d * d + std::log(sigma) + 0.5 * std::log(kTwoPi);
}

// Portable uniform in [0, 1) from mt19937_64; distributions in <random> are
// not bit-stable across standard libraries.
inline double next_uniform(std::mt19937_64& rng) {
    return (rng() >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace

MrfModel fit_mrf_model(const GrayImage& img, const MrfParams& params) {
    params.validate();
    if (img.empty()) throw ParameterError("mrf: empty image");
    const int k = params.label_count;

    // Intensity histogram; k-means runs over distinct values only.
    std::vector<int64_t> hist(img.levels(), 0);
    for (uint16_t v : img.data()) ++hist[v];
    std::vector<int> values;
    for (int v = 0; v < img.levels(); ++v)
        if (hist[v] > 0) values.push_back(v);
    if (static_cast<int>(values.size()) < k)
        throw ParameterError("mrf: label count " + std::to_string(k) +
                             " exceeds distinct intensity count " + std::to_string(values.size()));

    // k-means++ seeding over the histogram.
    std::mt19937_64 rng(params.init_seed);
    std::vector<double> centers;
    {
        int64_t total = std::accumulate(hist.begin(), hist.end(), int64_t{0});
        double r = next_uniform(rng) * total;
        int64_t acc = 0;
        for (int v : values) {
            acc += hist[v];
            if (acc >= r) {
                centers.push_back(v);
                break;
            }
        }
        while (static_cast<int>(centers.size()) < k) {
            double sum_d2 = 0.0;
            std::vector<double> d2(values.size());
            for (size_t i = 0; i < values.size(); ++i) {
                double best = std::numeric_limits<double>::max();
                for (double c : centers) best = std::min(best, (values[i] - c) * (values[i] - c));
                d2[i] = best * hist[values[i]];
                sum_d2 += d2[i];
            }
            if (sum_d2 <= 0) {
                // All mass on existing centers: place on the next unused value.
                for (int v : values)
                    if (std::find(centers.begin(), centers.end(), double(v)) == centers.end()) {
                        centers.push_back(v);
                        break;
                    }
                continue;
            }
            double r2 = next_uniform(rng) * sum_d2;
            double acc2 = 0.0;
            size_t pick = values.size() - 1;
            for (size_t i = 0; i < values.size(); ++i) {
                acc2 += d2[i];
                if (acc2 >= r2) {
                    pick = i;
                    break;
                }
            }
            centers.push_back(values[pick]);
        }
    }
    std::sort(centers.begin(), centers.end());

    // Lloyd iterations on the histogram until assignment is stable.
    std::vector<int> assign(values.size(), 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (size_t i = 0; i < values.size(); ++i) {
            int best = 0;
            double bd = std::numeric_limits<double>::max();
            for (int c = 0; c < k; ++c) {
                double d = std::abs(values[i] - centers[c]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        for (int c = 0; c < k; ++c) {
            double sum = 0;
            int64_t cnt = 0;
            for (size_t i = 0; i < values.size(); ++i) {
                if (assign[i] != c) continue;
                sum += double(values[i]) * hist[values[i]];
                cnt += hist[values[i]];
            }
            if (cnt > 0) centers[c] = sum / cnt;
        }
        if (!changed) break;
    }

    MrfModel model;
    model.beta_potts = params.beta_potts;
    model.mu.assign(k, 0.0);
    model.sigma.assign(k, 0.5);
    for (int c = 0; c < k; ++c) {
        double sum = 0, sum2 = 0;
        int64_t cnt = 0;
        for (size_t i = 0; i < values.size(); ++i) {
            if (assign[i] != c) continue;
            sum += double(values[i]) * hist[values[i]];
            sum2 += double(values[i]) * values[i] * hist[values[i]];
            cnt += hist[values[i]];
        }
        if (cnt > 0) {
            model.mu[c] = sum / cnt;
            double var = sum2 / cnt - model.mu[c] * model.mu[c];
            model.sigma[c] = std::max(0.5, std::sqrt(std::max(0.0, var)));
        } else {
            model.mu[c] = centers[c];
        }
    }
    return model;
}

double mrf_energy(const GrayImage& img, const LabelMap& labels, const MrfModel& model) {
    double e = 0.0;
    const int w = img.width(), h = img.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int l = labels.at(x, y);
            e += neg_log_gaussian(img.at(x, y), model.mu[l], model.sigma[l]);
            if (x + 1 < w && labels.at(x + 1, y) != l) e += model.beta_potts;
            if (y + 1 < h && labels.at(x, y + 1) != l) e += model.beta_potts;
        }
    }
    return e;
}

LabelMap mrf_segment(const GrayImage& img, const MrfParams& params,
                     std::vector<double>* sweep_energies) {
    MrfModel model = fit_mrf_model(img, params);
    const int k = params.label_count;
    const int w = img.width(), h = img.height();

    // Initial labeling = the k-means assignment (nearest cluster mean),
    // precomputed per intensity value.
    std::vector<uint8_t> km_label(img.levels());
    for (int v = 0; v < img.levels(); ++v) {
        int best = 0;
        double bd = std::numeric_limits<double>::max();
        for (int c = 0; c < k; ++c) {
            double d = std::abs(v - model.mu[c]);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        km_label[v] = static_cast<uint8_t>(best);
    }
    LabelMap labels(w, h, k);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) labels.at(x, y) = km_label[img.at(x, y)];

    if (sweep_energies) {
        sweep_energies->clear();
        sweep_energies->push_back(mrf_energy(img, labels, model));
    }

    // ICM: per pixel, adopt the label minimizing local energy, raster order,
    // strict improvement only. Each flip lowers the global energy.
    for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
        int changes = 0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const int cur = labels.at(x, y);
                const double v = img.at(x, y);
                auto local = [&](int c) {
                    double e = neg_log_gaussian(v, model.mu[c], model.sigma[c]);
                    if (x > 0 && labels.at(x - 1, y) != c) e += model.beta_potts;
                    if (x + 1 < w && labels.at(x + 1, y) != c) e += model.beta_potts;
                    if (y > 0 && labels.at(x, y - 1) != c) e += model.beta_potts;
                    if (y + 1 < h && labels.at(x, y + 1) != c) e += model.beta_potts;
                    return e;
                };
                // Strict improvement only; the current label wins ties, so
                // sweeps terminate and energy never increases.
                int best = cur;
                double best_e = local(cur);
                for (int c = 0; c < k; ++c) {
                    if (c == cur) continue;
                    double e = local(c);
                    if (e < best_e - 1e-12) {
                        best_e = e;
                        best = c;
                    }
                }
                if (best != cur) {
                    labels.at(x, y) = best;
                    ++changes;
                }
            }
        }
        if (sweep_energies) sweep_energies->push_back(mrf_energy(img, labels, model));
        if (changes == 0) break;
    }
    return labels;
}

int select_vessel_label(const GrayImage& raw, const LabelMap& labels, double top_fraction) {
    if (!(top_fraction > 0.0 && top_fraction <= 1.0))
        throw ParameterError("select_vessel_label: top_fraction must be in (0,1]");
    if (raw.width() != labels.width() || raw.height() != labels.height())
        throw ParameterError("select_vessel_label: dimensions mismatch");

    const size_t want = std::max<size_t>(
        1, static_cast<size_t>(std::llround(top_fraction * static_cast<double>(raw.size()))));

    // Bucket pixel indexes by intensity, then take the brightest `want`
    // pixels (index order inside an intensity level).
    std::vector<std::vector<size_t>> buckets(raw.levels());
    for (size_t i = 0; i < raw.size(); ++i) buckets[raw.data()[i]].push_back(i);

    std::vector<int64_t> votes(labels.label_count(), 0);
    size_t taken = 0;
    for (int v = raw.levels() - 1; v >= 0 && taken < want; --v) {
        for (size_t i : buckets[v]) {
            if (taken >= want) break;
            ++votes[labels.data()[i]];
            ++taken;
        }
    }
    int best = 0;
    for (int l = 1; l < labels.label_count(); ++l)
        if (votes[l] > votes[best]) best = l;  // ties keep the smaller id
    return best;
}

BinaryMask entropy_filter(const GrayImage& raw, const BinaryMask& mask, int window, int bins,
                          double threshold_bits) {
    if (threshold_bits < 0) throw ParameterError("entropy_filter: threshold must be >= 0");
    EntropyMap ent = local_entropy(raw, mask, window, bins);
    BinaryMask out = mask;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y) && ent.at(x, y) >= threshold_bits) out.set(x, y, false);
    return out;
}

void SegmentConfig::validate() const {
    mrf.validate();
    if (clahe_tiles_x < 1 || clahe_tiles_y < 1) throw ParameterError("segment: clahe tiles must be >= 1");
    if (!(clahe_clip > 0 && clahe_clip <= 1)) throw ParameterError("segment: clahe clip must be in (0,1]");
    if (clahe_bins < 2 || entropy_bins < 2) throw ParameterError("segment: bins must be >= 2");
    if (!(vessel_top_fraction > 0 && vessel_top_fraction <= 1))
        throw ParameterError("segment: vessel_top_fraction must be in (0,1]");
    if (entropy_window < 3 || entropy_window % 2 == 0)
        throw ParameterError("segment: entropy window must be odd >= 3");
    if (entropy_threshold_bits < 0) throw ParameterError("segment: entropy threshold must be >= 0");
    if (dilate_radius < 0) throw ParameterError("segment: dilate radius must be >= 0");
    if (connectivity != 4 && connectivity != 8) throw ParameterError("segment: connectivity must be 4 or 8");
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("segment stage '") + name + "': " + e.what());
    }
}

}  // namespace

BinaryMask segment_pipeline(const GrayImage& raw, const SegmentConfig& config,
                            LabelMap* label_map_out) {
    config.validate();

    // A near-blank image cannot carry K labels; there is nothing to segment.
    {
        std::vector<char> seen(raw.levels(), 0);
        int distinct = 0;
        for (uint16_t v : raw.data())
            if (!seen[v]) {
                seen[v] = 1;
                ++distinct;
            }
        if (distinct < config.mrf.label_count) {
            log::warn("segment: only " + std::to_string(distinct) +
                      " distinct intensities, returning empty mask");
            return BinaryMask(raw.width(), raw.height());
        }
    }

    GrayImage enhanced = stage("clahe", [&] {
        return clahe(raw, config.clahe_tiles_x, config.clahe_tiles_y, config.clahe_clip,
                     config.clahe_bins);
    });
    LabelMap labels = stage("mrf", [&] { return mrf_segment(enhanced, config.mrf); });
    if (label_map_out) *label_map_out = labels;
    int vessel = stage("label-vote", [&] {
        return select_vessel_label(raw, labels, config.vessel_top_fraction);
    });
    log::debug("segment: vessel label " + std::to_string(vessel));

    BinaryMask mask(raw.width(), raw.height());
    for (size_t i = 0; i < raw.size(); ++i) mask.data()[i] = labels.data()[i] == vessel ? 1 : 0;

    mask = stage("entropy-filter", [&] {
        return entropy_filter(raw, mask, config.entropy_window, config.entropy_bins,
                              config.entropy_threshold_bits);
    });
    mask = stage("largest-component", [&] { return largest_component(mask, config.connectivity); });
    mask = stage("dilate", [&] { return dilate(mask, config.dilate_radius); });
    mask = stage("fill-holes", [&] { return fill_holes(mask); });
    return mask;
}

}  // namespace vrec
