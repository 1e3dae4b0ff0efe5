#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tacsole/blob.hpp"
#include "tacsole/errors.hpp"
#include "tacsole/image.hpp"
#include "tacsole/mlp.hpp" // binary field helpers (put/get)
#include "tacsole/synth.hpp"

// Terrain classification at desk scale: a hand-crafted feature vector
// over the diff/threshold/components pipeline, fed to a multinomial
// logistic regression with label smoothing. Classes: blank, rock, spike,
// tile.

namespace tacsole {

inline constexpr int kTerrainClassCount = 4;
inline constexpr int kTerrainFeatureDim = 8;

struct TerrainFeatures {
    double blob_count = 0.0;
    double mean_blob_area = 0.0;   // px^2
    double blob_area_stddev = 0.0;
    double mean_nn_spacing = 0.0;  // px between blob centroids
    double spacing_stddev = 0.0;
    double grid_regularity = 0.0;  // [0, 1], 1 = perfectly even spacing
    double mean_diff_intensity = 0.0;
    double coverage = 0.0; // contact fraction of the nominal ROI

    std::array<double, kTerrainFeatureDim> as_vector() const
    {
        return {blob_count,      mean_blob_area, blob_area_stddev,    mean_nn_spacing,
                spacing_stddev,  grid_regularity, mean_diff_intensity, coverage};
    }

    static TerrainFeatures from_vector(const std::array<double, kTerrainFeatureDim>& v)
    {
        TerrainFeatures f;
        f.blob_count = v[0];
        f.mean_blob_area = v[1];
        f.blob_area_stddev = v[2];
        f.mean_nn_spacing = v[3];
        f.spacing_stddev = v[4];
        f.grid_regularity = v[5];
        f.mean_diff_intensity = v[6];
        f.coverage = v[7];
        return f;
    }
};

struct TerrainFeatureConfig {
    int diff_threshold = 18;
    int min_area_px = 6;
    // Intensity and coverage are normalized by this fixed pixel count so
    // padding a frame with unset border pixels leaves the features
    // unchanged. Defaults to the sensor ROI.
    double nominal_area_px = 114.0 * 143.0;
};

inline TerrainFeatures extract_features(const TactileFrame& frame, const TactileFrame& reference,
                                        const TerrainFeatureConfig& config = {})
{
    DiffImage diff = diff_reference(frame, reference);
    const ImageGray8& d = diff.values;
    ContactMask mask = label_components(
        d.width, d.height,
        [&](int r, int c) { return static_cast<int>(d.at(r, c)) >= config.diff_threshold; },
        config.min_area_px);
    std::vector<BlobStats> stats = blob_stats(mask);

    TerrainFeatures f;
    f.blob_count = static_cast<double>(stats.size());

    double sum_diff = 0.0;
    for (std::uint8_t v : d.px) sum_diff += v;
    f.mean_diff_intensity = sum_diff / config.nominal_area_px;
    f.coverage = static_cast<double>(mask.set_count()) / config.nominal_area_px;

    if (!stats.empty()) {
        double asum = 0.0, asum2 = 0.0;
        for (const BlobStats& s : stats) {
            asum += static_cast<double>(s.area);
            asum2 += static_cast<double>(s.area) * static_cast<double>(s.area);
        }
        double n = static_cast<double>(stats.size());
        f.mean_blob_area = asum / n;
        f.blob_area_stddev = std::sqrt(std::max(0.0, asum2 / n - (asum / n) * (asum / n)));
    }
    if (stats.size() >= 2) {
        std::vector<double> nn;
        nn.reserve(stats.size());
        for (std::size_t i = 0; i < stats.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < stats.size(); ++j) {
                if (i == j) continue;
                double dd = std::hypot(stats[i].centroid_row() - stats[j].centroid_row(),
                                       stats[i].centroid_col() - stats[j].centroid_col());
                best = std::min(best, dd);
            }
            nn.push_back(best);
        }
        double ssum = 0.0, ssum2 = 0.0;
        for (double v : nn) {
            ssum += v;
            ssum2 += v * v;
        }
        double n = static_cast<double>(nn.size());
        f.mean_nn_spacing = ssum / n;
        f.spacing_stddev = std::sqrt(std::max(0.0, ssum2 / n - (ssum / n) * (ssum / n)));
        f.grid_regularity =
            std::clamp(1.0 - f.spacing_stddev / (f.mean_nn_spacing + 1e-9), 0.0, 1.0);
    }
    return f;
}

// ---------------------------------------------------------------------------

struct TerrainModel {
    // weights[k] holds the bias followed by kTerrainFeatureDim weights for
    // class k; classes are ordered blank < rock < spike < tile.
    std::array<std::array<double, kTerrainFeatureDim + 1>, kTerrainClassCount> weights{};
    std::array<double, kTerrainFeatureDim> feature_mean{};
    std::array<double, kTerrainFeatureDim> feature_std{};
    double label_smoothing = 0.1;
    std::uint64_t seed = 0;
    bool trained = false;

    std::array<double, kTerrainClassCount> logits(
        const std::array<double, kTerrainFeatureDim>& raw) const
    {
        std::array<double, kTerrainClassCount> z{};
        for (int k = 0; k < kTerrainClassCount; ++k) {
            double acc = weights[k][0];
            for (int j = 0; j < kTerrainFeatureDim; ++j)
                acc += weights[k][j + 1] * (raw[j] - feature_mean[j]) / feature_std[j];
            z[k] = acc;
        }
        return z;
    }
};

struct TerrainPrediction {
    TerrainClass label = TerrainClass::Blank;
    std::array<double, kTerrainClassCount> confidence{}; // softmax, sums to 1
    double argmax_confidence = 0.0;
};

inline std::array<double, kTerrainClassCount> softmax(
    const std::array<double, kTerrainClassCount>& z)
{
    double zmax = *std::max_element(z.begin(), z.end());
    std::array<double, kTerrainClassCount> p{};
    double sum = 0.0;
    for (int k = 0; k < kTerrainClassCount; ++k) {
        p[k] = std::exp(z[k] - zmax);
        sum += p[k];
    }
    for (double& v : p) v /= sum;
    return p;
}

inline TerrainPrediction classify(const TerrainModel& model, const TerrainFeatures& features)
{
    if (!model.trained) throw model_error("classify: model not trained");
    TerrainPrediction pred;
    pred.confidence = softmax(model.logits(features.as_vector()));
    int best = 0;
    for (int k = 1; k < kTerrainClassCount; ++k)
        if (pred.confidence[k] > pred.confidence[best]) best = k; // ties keep class order
    pred.label = static_cast<TerrainClass>(best);
    pred.argmax_confidence = pred.confidence[best];
    return pred;
}

inline TerrainPrediction classify(const TerrainModel& model, const TactileFrame& frame,
                                  const TactileFrame& reference,
                                  const TerrainFeatureConfig& config = {})
{
    return classify(model, extract_features(frame, reference, config));
}

// ---------------------------------------------------------------------------
// Training: full-batch gradient descent with a backtracking line search
// on the label-smoothed cross entropy. Deterministic; no RNG in the
// optimization itself (the seed is recorded for the dataset provenance).

struct TerrainSample {
    std::array<double, kTerrainFeatureDim> features;
    TerrainClass label;
};

struct TerrainTrainConfig {
    int max_epochs = 40;
    int patience = 6; // stop after this many stagnant validation epochs
    double label_smoothing = 0.1;
    double initial_step = 1.0;
    std::uint64_t seed = 1;
};

struct TerrainTrainReport {
    int epochs_run = 0;
    bool stopped_early = false;
    double best_val_loss = 0.0;
    double final_train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
};

namespace detail {

struct TerrainObjective {
    // z-scored design matrix with leading 1 for the bias
    std::vector<std::array<double, kTerrainFeatureDim + 1>> x;
    std::vector<int> y;
    double smoothing;

    double loss(const std::array<std::array<double, kTerrainFeatureDim + 1>,
                                 kTerrainClassCount>& w) const
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::array<double, kTerrainClassCount> z{};
            for (int k = 0; k < kTerrainClassCount; ++k)
                for (int j = 0; j <= kTerrainFeatureDim; ++j) z[k] += w[k][j] * x[i][j];
            double zmax = *std::max_element(z.begin(), z.end());
            double lse = 0.0;
            for (int k = 0; k < kTerrainClassCount; ++k) lse += std::exp(z[k] - zmax);
            lse = std::log(lse) + zmax;
            for (int k = 0; k < kTerrainClassCount; ++k) {
                double t = smoothing / kTerrainClassCount + (k == y[i] ? 1.0 - smoothing : 0.0);
                acc -= t * (z[k] - lse);
            }
        }
        return acc / static_cast<double>(x.size());
    }

    void gradient(const std::array<std::array<double, kTerrainFeatureDim + 1>,
                                   kTerrainClassCount>& w,
                  std::array<std::array<double, kTerrainFeatureDim + 1>, kTerrainClassCount>& g)
        const
    {
        for (auto& row : g) row.fill(0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::array<double, kTerrainClassCount> z{};
            for (int k = 0; k < kTerrainClassCount; ++k)
                for (int j = 0; j <= kTerrainFeatureDim; ++j) z[k] += w[k][j] * x[i][j];
            auto p = softmax(z);
            for (int k = 0; k < kTerrainClassCount; ++k) {
                double t = smoothing / kTerrainClassCount + (k == y[i] ? 1.0 - smoothing : 0.0);
                double d = p[k] - t;
                for (int j = 0; j <= kTerrainFeatureDim; ++j) g[k][j] += d * x[i][j];
            }
        }
        double inv = 1.0 / static_cast<double>(x.size());
        for (auto& row : g)
            for (double& v : row) v *= inv;
    }
};

} // namespace detail

struct TerrainTrainResult {
    TerrainModel model;
    TerrainTrainReport report;
};

inline TerrainTrainResult train_classifier(std::span<const TerrainSample> train,
                                           std::span<const TerrainSample> validation,
                                           const TerrainTrainConfig& config = {})
{
    if (train.empty()) throw data_error("train_classifier: empty training set");
    std::array<bool, kTerrainClassCount> seen{};
    for (const TerrainSample& s : train) seen[static_cast<int>(s.label)] = true;
    int n_classes = 0;
    for (bool b : seen) n_classes += b;
    if (n_classes < 2) throw data_error("train_classifier: need at least 2 classes");

    TerrainTrainResult out;
    TerrainModel& model = out.model;
    model.label_smoothing = config.label_smoothing;
    model.seed = config.seed;

    // z-score normalization from the training statistics
    for (int j = 0; j < kTerrainFeatureDim; ++j) {
        double sum = 0.0, sum2 = 0.0;
        for (const TerrainSample& s : train) {
            sum += s.features[j];
            sum2 += s.features[j] * s.features[j];
        }
        double n = static_cast<double>(train.size());
        model.feature_mean[j] = sum / n;
        double var = std::max(0.0, sum2 / n - (sum / n) * (sum / n));
        model.feature_std[j] = std::sqrt(var) > 1e-9 ? std::sqrt(var) : 1.0;
    }

    auto build = [&](std::span<const TerrainSample> src) {
        detail::TerrainObjective obj;
        obj.smoothing = config.label_smoothing;
        for (const TerrainSample& s : src) {
            std::array<double, kTerrainFeatureDim + 1> row;
            row[0] = 1.0;
            for (int j = 0; j < kTerrainFeatureDim; ++j)
                row[j + 1] = (s.features[j] - model.feature_mean[j]) / model.feature_std[j];
            obj.x.push_back(row);
            obj.y.push_back(static_cast<int>(s.label));
        }
        return obj;
    };
    detail::TerrainObjective train_obj = build(train);
    detail::TerrainObjective val_obj = build(validation);

    auto& w = model.weights;
    for (auto& row : w) row.fill(0.0);
    std::array<std::array<double, kTerrainFeatureDim + 1>, kTerrainClassCount> grad{}, trial{};

    double step = config.initial_step;
    double train_loss = train_obj.loss(w);
    double best_val = validation.empty() ? train_loss : val_obj.loss(w);
    auto best_w = w;
    int stagnant = 0;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        train_obj.gradient(w, grad);
        double g2 = 0.0;
        for (const auto& row : grad)
            for (double v : row) g2 += v * v;
        if (!std::isfinite(train_loss) || !std::isfinite(g2))
            throw divergence_error("train_classifier: non-finite loss");
        if (g2 < 1e-16) {
            out.report.epochs_run = epoch;
            break;
        }
        // Backtracking line search (Armijo, c = 1e-4).
        double t = std::max(step * 2.0, 1e-6);
        double new_loss = train_loss;
        for (int bt = 0; bt < 40; ++bt) {
            for (int k = 0; k < kTerrainClassCount; ++k)
                for (int j = 0; j <= kTerrainFeatureDim; ++j)
                    trial[k][j] = w[k][j] - t * grad[k][j];
            new_loss = train_obj.loss(trial);
            if (new_loss <= train_loss - 1e-4 * t * g2) break;
            t *= 0.5;
        }
        w = trial;
        step = t;
        train_loss = new_loss;
        out.report.epochs_run = epoch + 1;

        double val_loss = validation.empty() ? train_loss : val_obj.loss(w);
        if (val_loss < best_val - 1e-9) {
            best_val = val_loss;
            best_w = w;
            stagnant = 0;
        } else if (++stagnant >= config.patience) {
            out.report.stopped_early = true;
            break;
        }
    }
    w = best_w; // keep the lowest-validation-loss model
    model.trained = true;

    auto accuracy = [&](std::span<const TerrainSample> src) {
        if (src.empty()) return 0.0;
        std::size_t ok = 0;
        for (const TerrainSample& s : src)
            ok += classify(model, TerrainFeatures::from_vector(s.features)).label == s.label;
        return static_cast<double>(ok) / static_cast<double>(src.size());
    };
    out.report.best_val_loss = best_val;
    out.report.final_train_loss = train_obj.loss(w);
    out.report.train_accuracy = accuracy(train);
    out.report.val_accuracy = accuracy(validation);
    return out;
}

// ---------------------------------------------------------------------------
// Row-normalized confusion matrix, percentages. Rows are true labels,
// columns predictions; each populated row sums to 100 up to rounding.

struct ConfusionMatrix {
    std::array<std::array<double, kTerrainClassCount>, kTerrainClassCount> percent{};
    std::array<std::array<std::uint64_t, kTerrainClassCount>, kTerrainClassCount> counts{};
    std::array<std::uint64_t, kTerrainClassCount> row_totals{};

    double diagonal_min() const
    {
        double m = 100.0;
        for (int k = 0; k < kTerrainClassCount; ++k)
            if (row_totals[k] > 0) m = std::min(m, percent[k][k]);
        return m;
    }
};

inline ConfusionMatrix confusion_matrix(const TerrainModel& model,
                                        std::span<const TerrainSample> test)
{
    if (test.empty()) throw data_error("confusion_matrix: empty test set");
    ConfusionMatrix cm;
    for (const TerrainSample& s : test) {
        int truth = static_cast<int>(s.label);
        int pred = static_cast<int>(
            classify(model, TerrainFeatures::from_vector(s.features)).label);
        cm.counts[truth][pred] += 1;
        cm.row_totals[truth] += 1;
    }
    for (int k = 0; k < kTerrainClassCount; ++k) {
        if (cm.row_totals[k] == 0) continue;
        for (int j = 0; j < kTerrainClassCount; ++j)
            cm.percent[k][j] =
                100.0 * static_cast<double>(cm.counts[k][j]) / static_cast<double>(cm.row_totals[k]);
    }
    return cm;
}

inline void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm)
{
    CsvWriter csv(path);
    std::vector<std::string> head{"true\\pred"};
    for (int k = 0; k < kTerrainClassCount; ++k)
        head.push_back(terrain_class_name(static_cast<TerrainClass>(k)));
    head.push_back("n");
    csv.header(head);
    for (int k = 0; k < kTerrainClassCount; ++k) {
        csv.field(terrain_class_name(static_cast<TerrainClass>(k)));
        for (int j = 0; j < kTerrainClassCount; ++j) csv.field(cm.percent[k][j]);
        csv.field(static_cast<std::int64_t>(cm.row_totals[k]));
        csv.end_row();
    }
}

// Blue-to-red heatmap of the row-normalized percentages, one square cell
// per entry.
inline ImageRGB8 render_confusion_heatmap(const ConfusionMatrix& cm, int cell_px = 40)
{
    ImageRGB8 img(kTerrainClassCount * cell_px, kTerrainClassCount * cell_px);
    for (int k = 0; k < kTerrainClassCount; ++k) {
        for (int j = 0; j < kTerrainClassCount; ++j) {
            double t = cm.percent[k][j] / 100.0;
            std::uint8_t r = static_cast<std::uint8_t>(std::lround(40 + 200 * t));
            std::uint8_t g = static_cast<std::uint8_t>(std::lround(40 + 40 * (1.0 - t)));
            std::uint8_t b = static_cast<std::uint8_t>(std::lround(220 - 180 * t));
            for (int pr = 0; pr < cell_px; ++pr)
                for (int pc = 0; pc < cell_px; ++pc) {
                    img.at(k * cell_px + pr, j * cell_px + pc, 0) = r;
                    img.at(k * cell_px + pr, j * cell_px + pc, 1) = g;
                    img.at(k * cell_px + pr, j * cell_px + pc, 2) = b;
                }
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// Model file: magic "TACLR1", little-endian. Feature dimension, class
// names, weights, normalization constants, smoothing and seed.

inline void save_terrain_model(const TerrainModel& model, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("model file: cannot open for writing: " + path);
    out.write("TACLR1", 6);
    detail::put_u32(out, kTerrainFeatureDim);
    detail::put_u32(out, kTerrainClassCount);
    for (int k = 0; k < kTerrainClassCount; ++k) {
        std::string name = terrain_class_name(static_cast<TerrainClass>(k));
        detail::put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    for (const auto& row : model.weights)
        for (double v : row) detail::put_f64(out, v);
    for (double v : model.feature_mean) detail::put_f64(out, v);
    for (double v : model.feature_std) detail::put_f64(out, v);
    detail::put_f64(out, model.label_smoothing);
    detail::put_u64(out, model.seed);
    if (!out) throw io_error("model file: short write: " + path);
}

inline TerrainModel load_terrain_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("model file: cannot open: " + path);
    char magic[6];
    in.read(magic, 6);
    if (!in || std::string(magic, 6) != "TACLR1")
        throw model_error("model file: bad magic (expected TACLR1): " + path);
    if (detail::get_u32(in) != kTerrainFeatureDim)
        throw model_error("model file: feature dimension mismatch");
    if (detail::get_u32(in) != kTerrainClassCount)
        throw model_error("model file: class count mismatch");
    for (int k = 0; k < kTerrainClassCount; ++k) {
        std::uint32_t len = detail::get_u32(in);
        std::string name(len, '\0');
        in.read(name.data(), static_cast<std::streamsize>(len));
        if (name != terrain_class_name(static_cast<TerrainClass>(k)))
            throw model_error("model file: class name mismatch: " + name);
    }
    TerrainModel model;
    for (auto& row : model.weights)
        for (double& v : row) v = detail::get_f64(in);
    for (double& v : model.feature_mean) v = detail::get_f64(in);
    for (double& v : model.feature_std) v = detail::get_f64(in);
    model.label_smoothing = detail::get_f64(in);
    model.seed = detail::get_u64(in);
    model.trained = true;
    return model;
}

} // namespace tacsole
