#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tacsole/errors.hpp"
#include "tacsole/image.hpp"
#include "tacsole/mlp.hpp"
#include "tacsole/rng.hpp"
#include "tacsole/synth.hpp"

// Calibration protocol: frames of a small sphere pressed into the pad,
// each annotated with the indentation center and diameter. Ground-truth
// gradients inside the annotated disk come from the sphere-cap geometry
// in closed form; pixels outside the disk are zero-gradient.

namespace tacsole {

struct SphereAnnotation {
    double center_row_px = 0.0;
    double center_col_px = 0.0;
    double diameter_px = 0.0; // annotated contact-disk diameter
};

struct CalibrationConfig {
    SceneGeometry geom = SceneGeometry::calibration();
    double sphere_radius_mm = 2.0; // 4 mm sphere
    double rim_px = 2.0;           // zero-gradient ring sampled around the disk
    double empty_rate = 0.03;      // fraction of samples replaced by empty points
    double train_fraction = 0.8;
    std::uint64_t seed = 1;
    // Frames whose background luminance variance exceeds this are culled
    // (stand-in for the hand removal of noisy captures).
    double background_variance_threshold = 25.0;
};

struct CalibrationSet {
    std::vector<GradientSample> train;
    std::vector<GradientSample> test;
    int width = 0;
    int height = 0;
    int images_used = 0;
    int images_culled = 0;
    std::size_t empty_points = 0;
};

// Analytic sphere-cap slope at a pixel, zero outside the annotated disk.
// The gradient depends only on the lateral offset from the center and the
// sphere radius, which is why center + diameter annotations suffice.
inline std::array<double, 2> sphere_cap_gradient(double row_px, double col_px,
                                                 const SphereAnnotation& ann,
                                                 double sphere_radius_mm,
                                                 const SceneGeometry& geom)
{
    double dx_mm = (col_px - ann.center_col_px) * geom.pitch_col_mm;
    double dy_mm = (row_px - ann.center_row_px) * geom.pitch_row_mm;
    double pitch_avg = 0.5 * (geom.pitch_row_mm + geom.pitch_col_mm);
    double a_mm = 0.5 * ann.diameter_px * pitch_avg;
    double rho2 = dx_mm * dx_mm + dy_mm * dy_mm;
    if (rho2 >= a_mm * a_mm) return {0.0, 0.0};
    double denom2 = sphere_radius_mm * sphere_radius_mm - rho2;
    if (denom2 <= 0.0) return {0.0, 0.0};
    double denom = std::sqrt(denom2);
    return {-dx_mm / denom, -dy_mm / denom};
}

inline CalibrationSet build_calibration_set(
    std::span<const std::pair<TactileFrame, SphereAnnotation>> images,
    const CalibrationConfig& config = CalibrationConfig{})
{
    if (images.empty()) throw data_error("build_calibration_set: no images");
    const SceneGeometry& geom = config.geom;
    int w = geom.width_px, h = geom.height_px;

    GradientModel norm;
    norm.set_roi_normalization(w, h);

    CalibrationSet set;
    set.width = w;
    set.height = h;

    // Validate annotations and apply the background-variance cull.
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const TactileFrame& frame = images[i].first;
        const SphereAnnotation& ann = images[i].second;
        if (frame.width() != w || frame.height() != h)
            throw geometry_error("build_calibration_set: frame does not match the ROI");
        double a_px = 0.5 * ann.diameter_px;
        if (ann.center_col_px - a_px < 0.0 || ann.center_col_px + a_px > w - 1 ||
            ann.center_row_px - a_px < 0.0 || ann.center_row_px + a_px > h - 1)
            throw annotation_error("build_calibration_set: annotated disk outside the ROI");

        ImageGray8 gray = to_gray(frame.pixels);
        double sum = 0.0, sum2 = 0.0;
        std::size_t n = 0;
        double guard = a_px + 4.0;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double dr = r - ann.center_row_px, dc = c - ann.center_col_px;
                if (dr * dr + dc * dc <= guard * guard) continue;
                double v = gray.at(r, c);
                sum += v;
                sum2 += v * v;
                ++n;
            }
        }
        double var = n > 0 ? sum2 / n - (sum / n) * (sum / n) : 0.0;
        if (var > config.background_variance_threshold) {
            ++set.images_culled;
            continue;
        }
        kept.push_back(i);
    }
    if (kept.empty()) throw data_error("build_calibration_set: every image was culled");
    set.images_used = static_cast<int>(kept.size());

    // 80/20 split by image, seeded.
    Rng rng = make_rng(config.seed);
    std::vector<std::size_t> order = kept;
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }
    std::size_t n_train_imgs =
        static_cast<std::size_t>(std::lround(config.train_fraction * order.size()));
    n_train_imgs = std::min(std::max<std::size_t>(n_train_imgs, 1), order.size());

    auto collect = [&](std::size_t img_idx, std::vector<GradientSample>& dst) {
        const TactileFrame& frame = images[img_idx].first;
        const SphereAnnotation& ann = images[img_idx].second;
        double a_px = 0.5 * ann.diameter_px;
        double reach = a_px + config.rim_px;
        int r0 = std::max(0, static_cast<int>(std::floor(ann.center_row_px - reach)));
        int r1 = std::min(h - 1, static_cast<int>(std::ceil(ann.center_row_px + reach)));
        int c0 = std::max(0, static_cast<int>(std::floor(ann.center_col_px - reach)));
        int c1 = std::min(w - 1, static_cast<int>(std::ceil(ann.center_col_px + reach)));
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                double dr = r - ann.center_row_px, dc = c - ann.center_col_px;
                if (dr * dr + dc * dc > reach * reach) continue;
                GradientSample s;
                s.input = norm.normalize(frame.pixels.at(r, c, 0), frame.pixels.at(r, c, 1),
                                         frame.pixels.at(r, c, 2), c, r);
                auto g = sphere_cap_gradient(r, c, ann, config.sphere_radius_mm, geom);
                s.target = {g[0], g[1]};
                dst.push_back(s);
            }
        }
    };
    for (std::size_t k = 0; k < order.size(); ++k)
        collect(order[k], k < n_train_imgs ? set.train : set.test);

    // Replace a seeded fraction of samples by artificial empty points:
    // background pixels far from any contact, target (0, 0). Empties for
    // each split are drawn from that split's own images.
    auto replace_empties = [&](std::vector<GradientSample>& dst, std::size_t img_begin,
                               std::size_t img_end) {
        if (dst.empty() || img_begin >= img_end) return;
        std::size_t n_empty = static_cast<std::size_t>(std::lround(config.empty_rate * dst.size()));
        for (std::size_t k = 0; k < n_empty; ++k) {
            std::size_t at = static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<std::int64_t>(dst.size()) - 1));
            std::size_t img_idx = order[static_cast<std::size_t>(uniform_int(
                rng, static_cast<std::int64_t>(img_begin), static_cast<std::int64_t>(img_end) - 1))];
            const TactileFrame& frame = images[img_idx].first;
            const SphereAnnotation& ann = images[img_idx].second;
            double a_px = 0.5 * ann.diameter_px;
            int r, c;
            do {
                r = static_cast<int>(uniform_int(rng, 0, h - 1));
                c = static_cast<int>(uniform_int(rng, 0, w - 1));
            } while (std::hypot(r - ann.center_row_px, c - ann.center_col_px) <=
                     a_px + config.rim_px + 1.0);
            GradientSample s;
            s.input = norm.normalize(frame.pixels.at(r, c, 0), frame.pixels.at(r, c, 1),
                                     frame.pixels.at(r, c, 2), c, r);
            s.target = {0.0, 0.0};
            dst[at] = s;
            ++set.empty_points;
        }
    };
    replace_empties(set.train, 0, n_train_imgs);
    replace_empties(set.test, n_train_imgs, order.size());
    return set;
}

struct CalibrationTrainResult {
    GradientModel model;
    MlpTrainReport report;
};

inline CalibrationTrainResult train_gradient_mlp(const CalibrationSet& set,
                                                 const MlpTrainConfig& config)
{
    CalibrationTrainResult result;
    result.model.set_roi_normalization(set.width, set.height);
    result.report = train_gradient_mlp(result.model, std::span<const GradientSample>(set.train),
                                       std::span<const GradientSample>(set.test), config);
    return result;
}

// ---------------------------------------------------------------------------
// Synthetic calibration captures: one sphere press per frame, uniformly
// placed, depth varied; annotations are the exact scene parameters.

struct SphereCaptureConfig {
    SceneGeometry geom = SceneGeometry::calibration();
    double sphere_radius_mm = 2.0;
    double min_depth_mm = 0.2;
    double max_depth_mm = 0.7;
    double noise_sigma = 0.0;
    ShadingModel shading;
};

inline std::vector<std::pair<TactileFrame, SphereAnnotation>> render_sphere_calibration(
    int n_images, std::uint64_t seed, const SphereCaptureConfig& config = SphereCaptureConfig{})
{
    std::vector<std::pair<TactileFrame, SphereAnnotation>> out;
    out.reserve(static_cast<std::size_t>(n_images));
    Rng rng = make_rng(seed);
    const SceneGeometry& g = config.geom;
    double pitch_avg = 0.5 * (g.pitch_row_mm + g.pitch_col_mm);
    for (int i = 0; i < n_images; ++i) {
        SphereIndenter sphere;
        sphere.radius_mm = config.sphere_radius_mm;
        sphere.depth_mm = uniform(rng, config.min_depth_mm, config.max_depth_mm);
        double a = sphere.contact_radius_mm();
        double margin = a + 1.0;
        sphere.x_mm = uniform(rng, margin, g.extent_x_mm() - margin);
        sphere.y_mm = uniform(rng, margin, g.extent_y_mm() - margin);

        IndenterScene scene;
        scene.geom = g;
        scene.indenters.push_back(sphere);
        scene.noise_sigma = config.noise_sigma;
        scene.seed = seed ^ (0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(i));
        IndentationRender render = render_indentation(scene, config.shading);
        render.frame.frame_index = i;

        SphereAnnotation ann;
        ann.center_row_px = sphere.y_mm / g.pitch_row_mm;
        ann.center_col_px = sphere.x_mm / g.pitch_col_mm;
        ann.diameter_px = 2.0 * a / pitch_avg;
        out.emplace_back(std::move(render.frame), ann);
    }
    return out;
}

} // namespace tacsole
