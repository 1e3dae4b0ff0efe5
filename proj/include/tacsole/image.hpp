#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tacsole/errors.hpp"

namespace tacsole {

// Interleaved 8-bit RGB raster.
struct ImageRGB8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> px; // size 3*width*height, row-major

    ImageRGB8() = default;
    ImageRGB8(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), px(static_cast<std::size_t>(w) * h * 3, fill)
    {
    }

    std::uint8_t& at(int row, int col, int ch)
    {
        return px[(static_cast<std::size_t>(row) * width + col) * 3 + ch];
    }
    std::uint8_t at(int row, int col, int ch) const
    {
        return px[(static_cast<std::size_t>(row) * width + col) * 3 + ch];
    }
    bool same_size(const ImageRGB8& o) const { return width == o.width && height == o.height; }
};

// 8-bit grayscale raster.
struct ImageGray8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> px;

    ImageGray8() = default;
    ImageGray8(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), px(static_cast<std::size_t>(w) * h, fill)
    {
    }

    std::uint8_t& at(int row, int col) { return px[static_cast<std::size_t>(row) * width + col]; }
    std::uint8_t at(int row, int col) const
    {
        return px[static_cast<std::size_t>(row) * width + col];
    }
    bool same_size(const ImageGray8& o) const { return width == o.width && height == o.height; }
};

// Double-precision scalar field on the pixel grid (depth maps, gradient
// components, feature planes).
struct FieldF64 {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    FieldF64() = default;
    FieldF64(int w, int h, double fill = 0.0)
        : width(w), height(h), v(static_cast<std::size_t>(w) * h, fill)
    {
    }

    double& at(int row, int col) { return v[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const { return v[static_cast<std::size_t>(row) * width + col]; }
    bool same_size(const FieldF64& o) const { return width == o.width && height == o.height; }
};

// One sensor image plus stream metadata. Frames are immutable after
// creation and safe to share across threads by value.
struct TactileFrame {
    ImageRGB8 pixels;
    double timestamp = 0.0; // seconds, monotonic within one source
    std::int64_t frame_index = 0;

    int width() const { return pixels.width; }
    int height() const { return pixels.height; }
};

// Physical pad geometry and its mapping onto the cropped ROI.
// mm_per_px_row = pad_length_mm / roi_height, mm_per_px_col = pad_width_mm / roi_width.
struct SensorGeometry {
    int roi_width = 114;          // px, lateral axis
    int roi_height = 143;         // px, front-back axis
    double pad_length_mm = 90.0;  // front-back extent
    double pad_width_mm = 58.0;   // lateral extent
    bool front_is_row_zero = true; // which image edge is the foot front

    double mm_per_px_row() const { return pad_length_mm / roi_height; }
    double mm_per_px_col() const { return pad_width_mm / roi_width; }

    void validate() const
    {
        if (roi_width < 1 || roi_height < 1 || pad_length_mm <= 0.0 || pad_width_mm <= 0.0)
            throw geometry_error("SensorGeometry: all dimensions must be strictly positive");
    }
};

// Grayscale difference against the no-contact reference. Stores the
// absolute per-pixel difference of the luminance images.
struct DiffImage {
    ImageGray8 values;

    int width() const { return values.width; }
    int height() const { return values.height; }
};

// Rec.601 luminance, rounded to nearest integer.
inline std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
    double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::lround(y));
}

inline ImageGray8 to_gray(const ImageRGB8& img)
{
    ImageGray8 out(img.width, img.height);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i)
        out.px[i] = luminance(img.px[3 * i], img.px[3 * i + 1], img.px[3 * i + 2]);
    return out;
}

// Rectangular region inside a frame: top-left corner plus size.
struct RoiRect {
    int row0 = 0;
    int col0 = 0;
    int width = 0;
    int height = 0;
};

// ROI placement centered in the parent frame (default when the offset is
// not configured).
inline RoiRect centered_roi(int frame_w, int frame_h, const SensorGeometry& geom)
{
    RoiRect r;
    r.width = geom.roi_width;
    r.height = geom.roi_height;
    r.col0 = (frame_w - geom.roi_width) / 2;
    r.row0 = (frame_h - geom.roi_height) / 2;
    return r;
}

inline ImageRGB8 crop(const ImageRGB8& img, const RoiRect& roi)
{
    if (roi.col0 < 0 || roi.row0 < 0 || roi.width < 1 || roi.height < 1 ||
        roi.col0 + roi.width > img.width || roi.row0 + roi.height > img.height)
        throw geometry_error("crop: ROI rectangle exceeds frame bounds");
    ImageRGB8 out(roi.width, roi.height);
    for (int r = 0; r < roi.height; ++r) {
        const std::uint8_t* src = &img.px[((static_cast<std::size_t>(r) + roi.row0) * img.width + roi.col0) * 3];
        std::uint8_t* dst = &out.px[static_cast<std::size_t>(r) * roi.width * 3];
        std::copy(src, src + static_cast<std::size_t>(roi.width) * 3, dst);
    }
    return out;
}

// Crop a frame to the sensor ROI; pixel values are copied unchanged,
// timestamp and index carry over.
inline TactileFrame crop_roi(const TactileFrame& frame, const SensorGeometry& geom,
                             const RoiRect* roi_override = nullptr)
{
    geom.validate();
    RoiRect roi = roi_override ? *roi_override
                               : centered_roi(frame.width(), frame.height(), geom);
    if (roi.width != geom.roi_width || roi.height != geom.roi_height)
        throw geometry_error("crop_roi: ROI size must match the sensor geometry");
    TactileFrame out;
    out.pixels = crop(frame.pixels, roi);
    out.timestamp = frame.timestamp;
    out.frame_index = frame.frame_index;
    return out;
}

// Absolute grayscale difference between a frame and the no-contact
// reference. Identically zero when frame == reference.
inline DiffImage diff_reference(const TactileFrame& frame, const TactileFrame& reference)
{
    if (!frame.pixels.same_size(reference.pixels))
        throw geometry_error("diff_reference: frame and reference dimensions differ");
    ImageGray8 a = to_gray(frame.pixels);
    ImageGray8 b = to_gray(reference.pixels);
    DiffImage out;
    out.values = ImageGray8(a.width, a.height);
    for (std::size_t i = 0; i < a.px.size(); ++i) {
        int d = static_cast<int>(a.px[i]) - static_cast<int>(b.px[i]);
        out.values.px[i] = static_cast<std::uint8_t>(d < 0 ? -d : d);
    }
    return out;
}

} // namespace tacsole
