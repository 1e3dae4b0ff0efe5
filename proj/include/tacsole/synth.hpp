#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tacsole/errors.hpp"
#include "tacsole/image.hpp"
#include "tacsole/rng.hpp"

// Synthetic tactile-image renderer. Produces frames with analytic ground
// truth (depth, gradients, contact mask, marker displacement, terrain
// label) so the perception pipelines can be trained and tested without
// hardware. Rendering is a pure function of (scene, seed).

namespace tacsole {

// Pixel grid and physical pitch of a rendered scene. Pixel (r, c) sits at
// pad coordinates (y, x) = (r * pitch_row_mm, c * pitch_col_mm).
struct SceneGeometry {
    int width_px = 114;
    int height_px = 143;
    double pitch_row_mm = 90.0 / 143.0;
    double pitch_col_mm = 58.0 / 114.0;

    double extent_y_mm() const { return height_px * pitch_row_mm; }
    double extent_x_mm() const { return width_px * pitch_col_mm; }

    static SceneGeometry sensor_matched() { return SceneGeometry{}; }
    // Isotropic 0.5 mm/px grid used for calibration scenes: a 4 mm sphere
    // spans ~8 px, enough for center/diameter annotation.
    static SceneGeometry calibration()
    {
        return SceneGeometry{114, 143, 0.5, 0.5};
    }
};

// ---------------------------------------------------------------------------
// Indenter primitives. Each primitive defines an analytic indentation
// depth h(x, y) >= 0 in mm; overlaps take the pointwise maximum.

struct SphereIndenter {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double radius_mm = 2.0;
    double depth_mm = 1.0;

    // Contact disk radius from the sphere-plane intersection.
    double contact_radius_mm() const
    {
        return std::sqrt(radius_mm * radius_mm -
                         (radius_mm - depth_mm) * (radius_mm - depth_mm));
    }
    double height(double x, double y) const
    {
        double dx = x - x_mm, dy = y - y_mm;
        double rho2 = dx * dx + dy * dy;
        double a = contact_radius_mm();
        if (rho2 >= a * a) return 0.0;
        return depth_mm - radius_mm + std::sqrt(radius_mm * radius_mm - rho2);
    }
    double max_extent_mm() const { return contact_radius_mm(); }
};

// Rotated rectangular indentation (box/prism edges). Flat top with a short
// cosine taper at the rim so the depth field stays continuous.
struct BoxIndenter {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double half_len_mm = 7.0;  // along the major axis
    double half_wid_mm = 2.0;  // along the minor axis
    double angle_deg = 0.0;    // major axis, degrees from +x toward +y
    double depth_mm = 0.6;
    double taper_mm = 0.4;

    double height(double x, double y) const
    {
        double a = angle_deg * std::numbers::pi / 180.0;
        double ca = std::cos(a), sa = std::sin(a);
        double dx = x - x_mm, dy = y - y_mm;
        double u = dx * ca + dy * sa;
        double v = -dx * sa + dy * ca;
        double fu = edge_profile(std::abs(u), half_len_mm);
        double fv = edge_profile(std::abs(v), half_wid_mm);
        return depth_mm * fu * fv;
    }
    double max_extent_mm() const
    {
        return std::hypot(half_len_mm + taper_mm, half_wid_mm + taper_mm);
    }

private:
    double edge_profile(double d, double half) const
    {
        if (d <= half) return 1.0;
        if (d >= half + taper_mm) return 0.0;
        double t = (d - half) / taper_mm;
        return 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    }
};

// Circular ridge (the rim of a cylinder pressed into the pad).
struct RingIndenter {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double radius_mm = 5.0;
    double half_width_mm = 0.8;
    double depth_mm = 0.6;

    double height(double x, double y) const
    {
        double rho = std::hypot(x - x_mm, y - y_mm);
        double d = std::abs(rho - radius_mm);
        if (d >= half_width_mm) return 0.0;
        return depth_mm * 0.5 * (1.0 + std::cos(std::numbers::pi * d / half_width_mm));
    }
    double max_extent_mm() const { return radius_mm + half_width_mm; }
};

// Flat circular cap (screw head), tapered rim.
struct DiscIndenter {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double radius_mm = 3.0;
    double depth_mm = 0.5;
    double taper_mm = 0.4;

    double height(double x, double y) const
    {
        double rho = std::hypot(x - x_mm, y - y_mm);
        if (rho <= radius_mm - taper_mm) return depth_mm;
        if (rho >= radius_mm) return 0.0;
        double t = (rho - (radius_mm - taper_mm)) / taper_mm;
        return depth_mm * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    }
    double max_extent_mm() const { return radius_mm; }
};

// Rotated superellipse dent; rocks use these with seeded eccentricity.
struct SuperellipseIndenter {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double semi_a_mm = 5.0;
    double semi_b_mm = 3.5;
    double exponent = 2.5;
    double angle_deg = 0.0;
    double depth_mm = 0.6;

    double height(double x, double y) const
    {
        double a = angle_deg * std::numbers::pi / 180.0;
        double ca = std::cos(a), sa = std::sin(a);
        double dx = x - x_mm, dy = y - y_mm;
        double u = (dx * ca + dy * sa) / semi_a_mm;
        double v = (-dx * sa + dy * ca) / semi_b_mm;
        double q = std::pow(std::abs(u), exponent) + std::pow(std::abs(v), exponent);
        if (q >= 1.0) return 0.0;
        // Smooth bowl: depth at the center, zero at the outline.
        double t = std::pow(q, 2.0 / exponent);
        return depth_mm * (1.0 - t);
    }
    double max_extent_mm() const { return std::max(semi_a_mm, semi_b_mm); }
};

using Indenter =
    std::variant<SphereIndenter, BoxIndenter, RingIndenter, DiscIndenter, SuperellipseIndenter>;

inline double indenter_height(const Indenter& p, double x, double y)
{
    return std::visit([&](const auto& v) { return v.height(x, y); }, p);
}
inline double indenter_x(const Indenter& p)
{
    return std::visit([](const auto& v) { return v.x_mm; }, p);
}
inline double indenter_y(const Indenter& p)
{
    return std::visit([](const auto& v) { return v.y_mm; }, p);
}
inline double indenter_extent(const Indenter& p)
{
    return std::visit([](const auto& v) { return v.max_extent_mm(); }, p);
}

struct IndenterScene {
    SceneGeometry geom;
    std::vector<Indenter> indenters;
    double noise_sigma = 0.0; // gray levels, per channel
    std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Shading. Four directional colored lights (red, green, blue, white from
// the pad's four sides) over a Lambertian surface, so color uniquely
// encodes the local gradient direction. contact_darkening additionally
// dims pixels in proportion to indentation depth; terrain and CoP scenes
// use it so pressed texture reads as dark blobs.

struct DirectionalLight {
    std::array<double, 3> dir;       // unit vector, (x, y, z), z toward camera
    std::array<double, 3> intensity; // per RGB channel
};

struct ShadingModel {
    std::array<DirectionalLight, 4> lights{
        DirectionalLight{{0.6, 0.0, 0.8}, {160.0, 0.0, 0.0}},   // red, +x side
        DirectionalLight{{-0.6, 0.0, 0.8}, {0.0, 160.0, 0.0}},  // green, -x side
        DirectionalLight{{0.0, 0.6, 0.8}, {0.0, 0.0, 160.0}},   // blue, +y side
        DirectionalLight{{0.0, -0.6, 0.8}, {80.0, 80.0, 80.0}}, // white, -y side
    };
    double albedo = 1.0;
    std::array<double, 3> ambient{25.0, 25.0, 25.0};
    double contact_darkening = 0.0; // per mm of indentation depth

    // Shade one pixel from its unitless surface gradient (dh/dx, dh/dy)
    // and indentation depth (mm).
    std::array<double, 3> shade(double gx, double gy, double depth_mm) const
    {
        double norm = std::sqrt(gx * gx + gy * gy + 1.0);
        double nx = -gx / norm, ny = -gy / norm, nz = 1.0 / norm;
        std::array<double, 3> rgb = ambient;
        for (const DirectionalLight& l : lights) {
            double d = nx * l.dir[0] + ny * l.dir[1] + nz * l.dir[2];
            if (d <= 0.0) continue;
            for (int c = 0; c < 3; ++c) rgb[c] += albedo * l.intensity[c] * d;
        }
        double atten = 1.0 / (1.0 + contact_darkening * depth_mm);
        for (int c = 0; c < 3; ++c) rgb[c] *= atten;
        return rgb;
    }

    static ShadingModel plain() { return ShadingModel{}; }
    static ShadingModel darkened(double coefficient = 1.2)
    {
        ShadingModel m;
        m.contact_darkening = coefficient;
        return m;
    }
};

// ---------------------------------------------------------------------------
// Ground truth bundle attached to every rendered scene.

struct PoseTruth {
    double row_px = 0.0;
    double col_px = 0.0;
    double orientation_deg = 0.0; // [0, 180)
};

enum class TerrainClass { Blank = 0, Rock = 1, Spike = 2, Tile = 3 };

inline const char* terrain_class_name(TerrainClass c)
{
    switch (c) {
        case TerrainClass::Blank: return "blank";
        case TerrainClass::Rock: return "rock";
        case TerrainClass::Spike: return "spike";
        case TerrainClass::Tile: return "tile";
    }
    return "?";
}

inline std::optional<TerrainClass> terrain_class_from_name(const std::string& s)
{
    if (s == "blank") return TerrainClass::Blank;
    if (s == "rock") return TerrainClass::Rock;
    if (s == "spike") return TerrainClass::Spike;
    if (s == "tile") return TerrainClass::Tile;
    return std::nullopt;
}

struct GroundTruth {
    FieldF64 depth;               // mm
    FieldF64 gx, gy;              // central differences of depth, mm/mm
    std::vector<std::uint8_t> contact_mask; // 1 exactly where depth > 0
    std::optional<PoseTruth> pose;
    std::optional<TerrainClass> terrain_label;

    bool mask_at(int row, int col) const
    {
        return contact_mask[static_cast<std::size_t>(row) * depth.width + col] != 0;
    }
};

namespace detail {

// Central differences in the interior, one-sided at the borders; spacing
// is the physical pixel pitch so gradients are unitless slope.
inline void finite_difference_gradients(const FieldF64& depth, double pitch_row, double pitch_col,
                                        FieldF64& gx, FieldF64& gy)
{
    int w = depth.width, h = depth.height;
    gx = FieldF64(w, h);
    gy = FieldF64(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double dzdx, dzdy;
            if (c == 0)
                dzdx = (depth.at(r, 1) - depth.at(r, 0)) / pitch_col;
            else if (c == w - 1)
                dzdx = (depth.at(r, w - 1) - depth.at(r, w - 2)) / pitch_col;
            else
                dzdx = (depth.at(r, c + 1) - depth.at(r, c - 1)) / (2.0 * pitch_col);
            if (r == 0)
                dzdy = (depth.at(1, c) - depth.at(0, c)) / pitch_row;
            else if (r == h - 1)
                dzdy = (depth.at(h - 1, c) - depth.at(h - 2, c)) / pitch_row;
            else
                dzdy = (depth.at(r + 1, c) - depth.at(r - 1, c)) / (2.0 * pitch_row);
            gx.at(r, c) = dzdx;
            gy.at(r, c) = dzdy;
        }
    }
}

inline ImageRGB8 shade_scene(const FieldF64& depth, const FieldF64& gx, const FieldF64& gy,
                             const ShadingModel& shading, double noise_sigma, std::uint64_t seed)
{
    ImageRGB8 img(depth.width, depth.height);
    Rng rng = make_rng(seed);
    for (int r = 0; r < depth.height; ++r) {
        for (int c = 0; c < depth.width; ++c) {
            std::array<double, 3> rgb =
                shading.shade(gx.at(r, c), gy.at(r, c), depth.at(r, c));
            for (int ch = 0; ch < 3; ++ch) {
                double v = rgb[ch];
                if (noise_sigma > 0.0) v += gaussian(rng, 0.0, noise_sigma);
                v = std::lround(std::clamp(v, 0.0, 255.0));
                img.at(r, c, ch) = static_cast<std::uint8_t>(v);
            }
        }
    }
    return img;
}

} // namespace detail

// Flat no-contact frame under the given shading; every synthetic source
// uses this as the reference image.
inline TactileFrame render_reference(const SceneGeometry& geom, const ShadingModel& shading)
{
    FieldF64 zero(geom.width_px, geom.height_px, 0.0);
    TactileFrame f;
    f.pixels = detail::shade_scene(zero, zero, zero, shading, 0.0, 0);
    return f;
}

struct IndentationRender {
    TactileFrame frame;
    GroundTruth truth;
};

inline IndentationRender render_indentation(const IndenterScene& scene,
                                            const ShadingModel& shading = ShadingModel::plain())
{
    const SceneGeometry& g = scene.geom;
    if (g.width_px < 2 || g.height_px < 2 || g.pitch_row_mm <= 0.0 || g.pitch_col_mm <= 0.0)
        throw scene_error("render_indentation: invalid scene geometry");
    double max_x = (g.width_px - 1) * g.pitch_col_mm;
    double max_y = (g.height_px - 1) * g.pitch_row_mm;
    for (const Indenter& p : scene.indenters) {
        double e = indenter_extent(p);
        double x = indenter_x(p), y = indenter_y(p);
        if (x - e < 0.0 || x + e > max_x || y - e < 0.0 || y + e > max_y)
            throw scene_error("render_indentation: primitive footprint outside the ROI");
    }

    GroundTruth truth;
    truth.depth = FieldF64(g.width_px, g.height_px, 0.0);
    for (int r = 0; r < g.height_px; ++r) {
        double y = r * g.pitch_row_mm;
        for (int c = 0; c < g.width_px; ++c) {
            double x = c * g.pitch_col_mm;
            double h = 0.0;
            for (const Indenter& p : scene.indenters)
                h = std::max(h, indenter_height(p, x, y));
            truth.depth.at(r, c) = h;
        }
    }
    detail::finite_difference_gradients(truth.depth, g.pitch_row_mm, g.pitch_col_mm, truth.gx,
                                        truth.gy);
    truth.contact_mask.assign(truth.depth.v.size(), 0);
    for (std::size_t i = 0; i < truth.depth.v.size(); ++i)
        truth.contact_mask[i] = truth.depth.v[i] > 0.0 ? 1 : 0;
    if (scene.indenters.size() == 1) {
        if (const BoxIndenter* b = std::get_if<BoxIndenter>(&scene.indenters[0])) {
            double ang = std::fmod(b->angle_deg, 180.0);
            if (ang < 0.0) ang += 180.0;
            truth.pose = PoseTruth{b->y_mm / g.pitch_row_mm, b->x_mm / g.pitch_col_mm, ang};
        }
    }

    IndentationRender out;
    out.truth = std::move(truth);
    out.frame.pixels = detail::shade_scene(out.truth.depth, out.truth.gx, out.truth.gy, shading,
                                           scene.noise_sigma, scene.seed);
    return out;
}

// ---------------------------------------------------------------------------
// Marker-grid scenes (shear ground truth).

inline constexpr int kMarkerCols = 9;
inline constexpr int kMarkerRows = 14;
inline constexpr int kMarkerCount = kMarkerCols * kMarkerRows;

struct MarkerSceneConfig {
    SceneGeometry geom;           // sensor-matched by default
    double marker_radius_px = 2.0;
    double ink_alpha = 0.9;       // normal marker opacity over the background
    double occluded_alpha = 0.15; // "too faint to detect"
    double noise_sigma = 0.0;
    ShadingModel shading;
};

// Rest position of marker (grid_row, grid_col) in pixel-index coordinates.
inline std::pair<double, double> marker_nominal_px(const SceneGeometry& geom, int grid_row,
                                                   int grid_col)
{
    double row = (grid_row + 0.5) * geom.height_px / static_cast<double>(kMarkerRows) - 0.5;
    double col = (grid_col + 0.5) * geom.width_px / static_cast<double>(kMarkerCols) - 0.5;
    return {row, col};
}

enum class VectorProvenance { Detected = 0, Interpolated = 1 };

struct ShearVector {
    double dx_px = 0.0; // column displacement
    double dy_px = 0.0; // row displacement
    VectorProvenance provenance = VectorProvenance::Detected;
};

struct ShearField {
    std::array<ShearVector, kMarkerCount> vectors{};
    double timestamp = 0.0;

    static int node_index(int grid_row, int grid_col) { return grid_row * kMarkerCols + grid_col; }
};

struct MarkerRender {
    TactileFrame frame;
    ShearField truth; // occluded markers carry the Interpolated flag
    std::vector<int> occluded_nodes;
};

inline MarkerRender render_marker_grid(const std::vector<std::pair<double, double>>& displacements,
                                       double dropout, std::uint64_t seed,
                                       const MarkerSceneConfig& config = MarkerSceneConfig{})
{
    if (displacements.size() != static_cast<std::size_t>(kMarkerCount))
        throw scene_error("render_marker_grid: expected exactly 126 displacement vectors");
    if (dropout < 0.0 || dropout >= 1.0)
        throw scene_error("render_marker_grid: dropout must lie in [0, 1)");

    const SceneGeometry& g = config.geom;
    Rng rng = make_rng(seed);

    // Seeded choice of occluded markers: Fisher-Yates prefix.
    int n_occluded = static_cast<int>(std::lround(dropout * kMarkerCount));
    std::vector<int> order(kMarkerCount);
    for (int i = 0; i < kMarkerCount; ++i) order[i] = i;
    for (int i = kMarkerCount - 1; i > 0; --i) {
        int j = static_cast<int>(uniform_int(rng, 0, i));
        std::swap(order[i], order[j]);
    }
    std::vector<std::uint8_t> occluded(kMarkerCount, 0);
    MarkerRender out;
    for (int k = 0; k < n_occluded; ++k) {
        occluded[order[k]] = 1;
        out.occluded_nodes.push_back(order[k]);
    }

    // Ink coverage map: alpha accumulated per pixel.
    FieldF64 ink(g.width_px, g.height_px, 0.0);
    for (int gr = 0; gr < kMarkerRows; ++gr) {
        for (int gc = 0; gc < kMarkerCols; ++gc) {
            int node = ShearField::node_index(gr, gc);
            auto [nr, nc] = marker_nominal_px(g, gr, gc);
            double cr = nr + displacements[node].second; // (dx, dy) = (col, row)
            double cc = nc + displacements[node].first;
            double alpha = occluded[node] ? config.occluded_alpha : config.ink_alpha;
            int r0 = std::max(0, static_cast<int>(std::floor(cr - config.marker_radius_px - 1)));
            int r1 = std::min(g.height_px - 1,
                              static_cast<int>(std::ceil(cr + config.marker_radius_px + 1)));
            int c0 = std::max(0, static_cast<int>(std::floor(cc - config.marker_radius_px - 1)));
            int c1 = std::min(g.width_px - 1,
                              static_cast<int>(std::ceil(cc + config.marker_radius_px + 1)));
            for (int r = r0; r <= r1; ++r) {
                for (int c = c0; c <= c1; ++c) {
                    double dist = std::hypot(r - cr, c - cc);
                    double cov = std::clamp(config.marker_radius_px + 0.5 - dist, 0.0, 1.0);
                    double a = alpha * cov;
                    double& cur = ink.at(r, c);
                    cur = 1.0 - (1.0 - cur) * (1.0 - a); // alpha compositing
                }
            }

            ShearVector v;
            v.dx_px = displacements[node].first;
            v.dy_px = displacements[node].second;
            v.provenance =
                occluded[node] ? VectorProvenance::Interpolated : VectorProvenance::Detected;
            out.truth.vectors[node] = v;
        }
    }

    FieldF64 zero(g.width_px, g.height_px, 0.0);
    ImageRGB8 img = detail::shade_scene(zero, zero, zero, config.shading, 0.0, 0);
    Rng noise_rng = make_rng(seed ^ 0x9e3779b97f4a7c15ull);
    for (int r = 0; r < g.height_px; ++r) {
        for (int c = 0; c < g.width_px; ++c) {
            double a = ink.at(r, c);
            for (int ch = 0; ch < 3; ++ch) {
                double v = img.at(r, c, ch) * (1.0 - a);
                if (config.noise_sigma > 0.0) v += gaussian(noise_rng, 0.0, config.noise_sigma);
                img.at(r, c, ch) =
                    static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            }
        }
    }
    out.frame.pixels = std::move(img);
    return out;
}

// ---------------------------------------------------------------------------
// Terrain scenes.

struct TerrainSceneConfig {
    SceneGeometry geom;          // sensor-matched by default
    double noise_sigma = 2.0;
    ShadingModel shading = ShadingModel::darkened();
    double tile_size_mm = 12.0;
    double tile_spacing_mm = 25.0;
    double spike_diameter_mm = 2.5;
    double spike_spacing_mm = 12.5;
    double fabric_blur_sigma_px = 1.1; // 0.2 mm cotton fabric smoothing
};

struct TerrainRender {
    TactileFrame frame;
    TerrainClass label = TerrainClass::Blank;
    GroundTruth truth;
};

namespace detail {

inline ImageRGB8 gaussian_blur(const ImageRGB8& img, double sigma)
{
    int radius = std::max(1, static_cast<int>(std::ceil(2.5 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : kernel) w /= sum;

    ImageRGB8 tmp(img.width, img.height);
    // Horizontal pass with clamped borders.
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int cc = std::clamp(c + k, 0, img.width - 1);
                    acc += kernel[static_cast<std::size_t>(k + radius)] * img.at(r, cc, ch);
                }
                tmp.at(r, c, ch) = static_cast<std::uint8_t>(std::lround(acc));
            }
        }
    }
    ImageRGB8 outimg(img.width, img.height);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int rr = std::clamp(r + k, 0, img.height - 1);
                    acc += kernel[static_cast<std::size_t>(k + radius)] * tmp.at(rr, c, ch);
                }
                outimg.at(r, c, ch) = static_cast<std::uint8_t>(std::lround(acc));
            }
        }
    }
    return outimg;
}

// Grid centers that fit inside an extent: floor(extent / pitch) of them,
// centered, with an optional seeded phase jitter that keeps the count.
inline std::vector<double> grid_centers(double extent_mm, double pitch_mm, double jitter_mm,
                                        Rng& rng)
{
    int n = static_cast<int>(std::floor(extent_mm / pitch_mm));
    std::vector<double> centers;
    if (n < 1) return centers;
    double start = (extent_mm - (n - 1) * pitch_mm) / 2.0;
    double phase = jitter_mm > 0.0 ? uniform(rng, -jitter_mm, jitter_mm) : 0.0;
    for (int i = 0; i < n; ++i) centers.push_back(start + phase + i * pitch_mm);
    return centers;
}

} // namespace detail

inline TerrainRender render_terrain(TerrainClass cls, bool fabric_blur, std::uint64_t seed,
                                    const TerrainSceneConfig& config = TerrainSceneConfig{})
{
    const SceneGeometry& g = config.geom;
    Rng rng = make_rng(seed);
    IndenterScene scene;
    scene.geom = g;
    scene.noise_sigma = 0.0; // noise added after the optional blur
    scene.seed = seed;

    double ext_x = g.extent_x_mm();
    double ext_y = g.extent_y_mm();

    switch (cls) {
        case TerrainClass::Blank:
            break;
        case TerrainClass::Tile: {
            // Square plastic tiles on a regular grid with a seeded phase.
            auto cols = detail::grid_centers(ext_x, config.tile_spacing_mm, 3.0, rng);
            auto rows = detail::grid_centers(ext_y, config.tile_spacing_mm, 3.0, rng);
            for (double y : rows) {
                for (double x : cols) {
                    BoxIndenter b;
                    b.x_mm = x;
                    b.y_mm = y;
                    b.half_len_mm = config.tile_size_mm / 2.0;
                    b.half_wid_mm = config.tile_size_mm / 2.0;
                    b.angle_deg = uniform(rng, -4.0, 4.0);
                    b.depth_mm = uniform(rng, 0.45, 0.7);
                    b.taper_mm = 0.5;
                    scene.indenters.push_back(b);
                }
            }
            break;
        }
        case TerrainClass::Spike: {
            // 2.5 mm printed spikes on a 12.5 mm grid; jitter small enough
            // to keep floor(extent/pitch) centers per axis.
            auto cols = detail::grid_centers(ext_x, config.spike_spacing_mm, 1.5, rng);
            auto rows = detail::grid_centers(ext_y, config.spike_spacing_mm, 1.5, rng);
            for (double y : rows) {
                for (double x : cols) {
                    DiscIndenter d;
                    d.x_mm = x;
                    d.y_mm = y;
                    d.radius_mm = config.spike_diameter_mm / 2.0;
                    d.depth_mm = uniform(rng, 0.5, 0.8);
                    d.taper_mm = 0.5;
                    scene.indenters.push_back(d);
                }
            }
            break;
        }
        case TerrainClass::Rock: {
            // Irregular rounded dents: jittered coarse grid, seeded
            // eccentricity in [1, 2] and depth in [0.3, 1.0] mm.
            auto cols = detail::grid_centers(ext_x, 27.0, 1.0, rng);
            auto rows = detail::grid_centers(ext_y, 27.0, 1.0, rng);
            for (double y : rows) {
                for (double x : cols) {
                    SuperellipseIndenter s;
                    double ecc = uniform(rng, 1.0, 2.0);
                    double base = uniform(rng, 4.0, 6.5);
                    s.x_mm = x + uniform(rng, -6.0, 6.0);
                    s.y_mm = y + uniform(rng, -6.0, 6.0);
                    s.semi_a_mm = base * std::sqrt(ecc);
                    s.semi_b_mm = base / std::sqrt(ecc);
                    s.exponent = uniform(rng, 1.6, 3.0);
                    s.angle_deg = uniform(rng, 0.0, 180.0);
                    s.depth_mm = uniform(rng, 0.3, 1.0);
                    // Clamp inside the pad; rocks may sit near the rim.
                    double e = s.max_extent_mm();
                    s.x_mm = std::clamp(s.x_mm, e + 0.2, ext_x - e - 0.2);
                    s.y_mm = std::clamp(s.y_mm, e + 0.2, ext_y - e - 0.2);
                    scene.indenters.push_back(s);
                }
            }
            break;
        }
    }

    TerrainRender out;
    out.label = cls;

    // Depth/gradients/mask via the indentation path, then class-specific
    // post-processing of the image.
    IndentationRender base = render_indentation(scene, config.shading);
    out.truth = std::move(base.truth);
    ImageRGB8 img = std::move(base.frame.pixels);
    if (fabric_blur) img = detail::gaussian_blur(img, config.fabric_blur_sigma_px);
    if (config.noise_sigma > 0.0) {
        Rng noise_rng = make_rng(seed ^ 0xda3e39cb94b95bdbull);
        for (std::uint8_t& px : img.px) {
            double v = px + gaussian(noise_rng, 0.0, config.noise_sigma);
            px = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
        }
    }
    out.frame.pixels = std::move(img);
    out.truth.terrain_label = cls;
    return out;
}

// ---------------------------------------------------------------------------
// Textured-floor press scenes (CoP pipeline and full-mode balance loop).
// The floor is a grid of small cylinders; a pressure profile centered at
// (press_row, press_col) sets how deep each cylinder indents the pad.

struct PressSceneConfig {
    SceneGeometry geom;           // sensor-matched by default
    double texture_pitch_mm = 6.0;
    double cylinder_radius_mm = 1.5;
    double press_sigma_mm = 14.0;
    double max_depth_mm = 1.0;
    double visible_depth_mm = 0.1; // ground-truth visibility cutoff
    double noise_sigma = 2.0;
    ShadingModel shading = ShadingModel::darkened();
};

struct PressRender {
    TactileFrame frame;
    GroundTruth truth;
    int visible_cylinders = 0; // dents at or above the visibility cutoff
    double true_cop_row = 0.0; // depth-weighted mean of dent centers, px
    double true_cop_col = 0.0;
};

inline PressRender render_textured_press(double press_row_px, double press_col_px,
                                         std::uint64_t seed,
                                         const PressSceneConfig& config = PressSceneConfig{})
{
    const SceneGeometry& g = config.geom;
    IndenterScene scene;
    scene.geom = g;
    scene.noise_sigma = config.noise_sigma;
    scene.seed = seed;

    double press_x = press_col_px * g.pitch_col_mm;
    double press_y = press_row_px * g.pitch_row_mm;
    double s2 = 2.0 * config.press_sigma_mm * config.press_sigma_mm;

    Rng grid_rng = make_rng(seed ^ 0xc2b2ae3d27d4eb4full);
    auto cols = detail::grid_centers(g.extent_x_mm(), config.texture_pitch_mm, 0.8, grid_rng);
    auto rows = detail::grid_centers(g.extent_y_mm(), config.texture_pitch_mm, 0.8, grid_rng);

    PressRender out;
    double wsum = 0.0, wr = 0.0, wc = 0.0;
    double margin = config.cylinder_radius_mm + 0.2;
    for (double y : rows) {
        for (double x : cols) {
            double d2 = (x - press_x) * (x - press_x) + (y - press_y) * (y - press_y);
            double depth = config.max_depth_mm * std::exp(-d2 / s2);
            if (depth < 0.02) continue; // numerically invisible
            if (x - margin < 0.0 || x + margin > g.extent_x_mm() || y - margin < 0.0 ||
                y + margin > g.extent_y_mm())
                continue;
            DiscIndenter dent;
            dent.x_mm = x;
            dent.y_mm = y;
            dent.radius_mm = config.cylinder_radius_mm;
            dent.depth_mm = depth;
            dent.taper_mm = 0.5;
            scene.indenters.push_back(dent);
            if (depth >= config.visible_depth_mm) {
                ++out.visible_cylinders;
                wsum += depth;
                wr += depth * (y / g.pitch_row_mm);
                wc += depth * (x / g.pitch_col_mm);
            }
        }
    }
    if (wsum > 0.0) {
        out.true_cop_row = wr / wsum;
        out.true_cop_col = wc / wsum;
    }

    IndentationRender base = render_indentation(scene, config.shading);
    out.frame = std::move(base.frame);
    out.truth = std::move(base.truth);
    return out;
}

} // namespace tacsole
