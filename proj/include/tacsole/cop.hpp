#pragma once

#include <cstdint>
#include <string>

#include "tacsole/blob.hpp"
#include "tacsole/csv.hpp"
#include "tacsole/draw.hpp"
#include "tacsole/image.hpp"

// Center-of-pressure from textured-floor contact images. Pressed texture
// bumps read as dark blobs; the CoP is the binary-weighted mean of their
// pixels (the front-back row coordinate is the controlled axis).

namespace tacsole {

enum class CopStatus { Safe = 0, Unsafe = 1, NoContact = 2 };

inline const char* cop_status_name(CopStatus s)
{
    switch (s) {
        case CopStatus::Safe: return "safe";
        case CopStatus::Unsafe: return "unsafe";
        case CopStatus::NoContact: return "no_contact";
    }
    return "?";
}

struct CoPEstimate {
    double cop_row = 0.0;        // front-back axis (the controlled one)
    double cop_col = 0.0;        // lateral, auxiliary
    std::uint64_t n_pixels = 0;  // contributing pixels, sum of the binary weights
    double offset_fraction = 0.0; // (cop_row - center_row) / (roi_height / 2)
    CopStatus status = CopStatus::NoContact;
    // Exact integer accumulators, exposed so equivariance checks can be
    // made without floating-point rounding in the way.
    std::uint64_t sum_rows = 0;
    std::uint64_t sum_cols = 0;
};

struct PressureThresholdConfig {
    int threshold = 200; // inverted binary over [threshold, 255]
    int min_area_px = 5;
};

// The paper's inverted-binary semantics: the current grayscale frame is
// compared against the band, so a pixel is foreground iff its gray value
// is <= threshold (values in [threshold+1, 255] are zeroed). Pressed
// texture bumps are darker than the illuminated background and become
// the foreground blobs.
inline ContactMask threshold_pressure(const ImageGray8& gray,
                                      const PressureThresholdConfig& config = {})
{
    return label_components(
        gray.width, gray.height,
        [&](int r, int c) { return static_cast<int>(gray.at(r, c)) <= config.threshold; },
        config.min_area_px);
}

inline ContactMask threshold_pressure(const DiffImage& diff,
                                      const PressureThresholdConfig& config = {})
{
    return threshold_pressure(diff.values, config);
}

inline CopStatus classify_safety(double offset_fraction, std::uint64_t n_pixels,
                                 double safe_fraction = 0.25)
{
    if (n_pixels == 0) return CopStatus::NoContact;
    double mag = offset_fraction < 0.0 ? -offset_fraction : offset_fraction;
    // "beyond" the safe distance is unsafe, so equality stays safe.
    return mag > safe_fraction ? CopStatus::Unsafe : CopStatus::Safe;
}

// Binary-weighted mean over all set pixels: cop = sum(p_i) / N with the
// sums kept in exact integers; cop_col computed symmetrically.
inline CoPEstimate estimate_cop(const ContactMask& mask, const SensorGeometry& geom,
                                double safe_fraction = 0.25)
{
    if (mask.width != geom.roi_width || mask.height != geom.roi_height)
        throw geometry_error("estimate_cop: mask does not match the sensor geometry");
    CoPEstimate est;
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            if (!mask.set(r, c)) continue;
            est.n_pixels += 1;
            est.sum_rows += static_cast<std::uint64_t>(r);
            est.sum_cols += static_cast<std::uint64_t>(c);
        }
    }
    if (est.n_pixels == 0) {
        est.status = CopStatus::NoContact;
        return est;
    }
    est.cop_row = static_cast<double>(est.sum_rows) / static_cast<double>(est.n_pixels);
    est.cop_col = static_cast<double>(est.sum_cols) / static_cast<double>(est.n_pixels);
    double center_row = (geom.roi_height - 1) / 2.0;
    est.offset_fraction = (est.cop_row - center_row) / (geom.roi_height / 2.0);
    est.status = classify_safety(est.offset_fraction, est.n_pixels, safe_fraction);
    return est;
}

// Secondary mode: average of the component centroids, unweighted by area
// (the contour-center reading of the pipeline). Differs from the
// pixel-weighted mean whenever blob areas differ.
inline CoPEstimate estimate_cop_contour_mean(const ContactMask& mask, const SensorGeometry& geom,
                                             double safe_fraction = 0.25)
{
    if (mask.width != geom.roi_width || mask.height != geom.roi_height)
        throw geometry_error("estimate_cop_contour_mean: mask does not match the sensor geometry");
    std::vector<BlobStats> stats = blob_stats(mask);
    CoPEstimate est;
    if (stats.empty()) {
        est.status = CopStatus::NoContact;
        return est;
    }
    double sr = 0.0, sc = 0.0;
    for (const BlobStats& s : stats) {
        sr += s.centroid_row();
        sc += s.centroid_col();
        est.n_pixels += s.area;
    }
    est.cop_row = sr / static_cast<double>(stats.size());
    est.cop_col = sc / static_cast<double>(stats.size());
    double center_row = (geom.roi_height - 1) / 2.0;
    est.offset_fraction = (est.cop_row - center_row) / (geom.roi_height / 2.0);
    est.status = classify_safety(est.offset_fraction, est.n_pixels, safe_fraction);
    return est;
}

// Overlay: blue line at the geometric center, CoP line green when safe
// and red when unsafe.
inline ImageRGB8 render_cop_overlay(const TactileFrame& frame, const CoPEstimate& est,
                                    const SensorGeometry& geom)
{
    ImageRGB8 img = frame.pixels;
    int center_row = static_cast<int>(std::lround((geom.roi_height - 1) / 2.0));
    draw_hline(img, center_row, kBlue);
    if (est.status != CopStatus::NoContact) {
        Color c = est.status == CopStatus::Safe ? kGreen : kRed;
        draw_hline(img, static_cast<int>(std::lround(est.cop_row)), c);
    }
    return img;
}

class CopTraceWriter {
public:
    explicit CopTraceWriter(const std::string& path) : csv_(path)
    {
        csv_.header({"timestamp", "frame_index", "cop_row", "cop_col", "n_pixels",
                     "offset_fraction", "status"});
    }
    void add(double timestamp, std::int64_t frame_index, const CoPEstimate& est)
    {
        csv_.field(timestamp)
            .field(frame_index)
            .field(est.cop_row)
            .field(est.cop_col)
            .field(static_cast<std::int64_t>(est.n_pixels))
            .field(est.offset_fraction)
            .field(cop_status_name(est.status));
        csv_.end_row();
    }
    void flush() { csv_.flush(); }

private:
    CsvWriter csv_;
};

} // namespace tacsole
