#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tacsole/blob.hpp"
#include "tacsole/csv.hpp"
#include "tacsole/draw.hpp"
#include "tacsole/errors.hpp"
#include "tacsole/image.hpp"
#include "tacsole/synth.hpp"

// Shear sensing: detect the 9x14 marker grid, track per-marker
// displacement against the rest frame, interpolate lost markers, and
// render the arrow overlay. Magnitudes stay in pixels; there is no
// force calibration.

namespace tacsole {

struct MarkerDetection {
    double row_px = 0.0;
    double col_px = 0.0;
    double confidence = 0.0; // mean darkness of the blob, 0..1
    int node = -1;           // matched grid node, -1 if outside capture radius
};

struct MarkerSet {
    SceneGeometry geom;
    double timestamp = 0.0;
    std::vector<MarkerDetection> detections;

    bool node_detected(int node) const
    {
        for (const MarkerDetection& d : detections)
            if (d.node == node) return true;
        return false;
    }
    const MarkerDetection* find_node(int node) const
    {
        for (const MarkerDetection& d : detections)
            if (d.node == node) return &d;
        return nullptr;
    }
};

struct MarkerDetectConfig {
    int darkness_threshold = 60; // gray levels below the background
    int min_area_px = 3;
    int max_area_px = 200;
};

// Half the nominal grid pitch: a marker displaced farther than this is
// declared lost rather than matched to a neighboring node.
inline double marker_capture_radius(const SceneGeometry& geom)
{
    double pitch_r = geom.height_px / static_cast<double>(kMarkerRows);
    double pitch_c = geom.width_px / static_cast<double>(kMarkerCols);
    return 0.5 * std::min(pitch_r, pitch_c);
}

inline MarkerSet detect_markers(const TactileFrame& frame,
                                const SceneGeometry& geom = SceneGeometry::sensor_matched(),
                                const MarkerDetectConfig& config = MarkerDetectConfig{})
{
    ImageGray8 gray = to_gray(frame.pixels);

    // Background level: the most frequent gray value (markers cover a
    // small area, so the histogram mode is the plain pad).
    std::array<std::size_t, 256> hist{};
    for (std::uint8_t v : gray.px) ++hist[v];
    int background = 0;
    for (int v = 1; v < 256; ++v)
        if (hist[v] > hist[background]) background = v;

    auto dark = [&](int r, int c) {
        return background - static_cast<int>(gray.at(r, c)) >= config.darkness_threshold;
    };
    ContactMask mask = label_components(gray.width, gray.height, dark, config.min_area_px);

    MarkerSet set;
    set.geom = geom;
    set.timestamp = frame.timestamp;

    // Darkness-weighted centroids for subpixel accuracy.
    std::vector<double> wsum(static_cast<std::size_t>(mask.component_count), 0.0);
    std::vector<double> wr(wsum.size(), 0.0), wc(wsum.size(), 0.0);
    std::vector<std::uint64_t> area(wsum.size(), 0);
    for (int r = 0; r < gray.height; ++r) {
        for (int c = 0; c < gray.width; ++c) {
            std::int32_t l = mask.label(r, c);
            if (l == 0) continue;
            double w = background - static_cast<double>(gray.at(r, c));
            wsum[l - 1] += w;
            wr[l - 1] += w * r;
            wc[l - 1] += w * c;
            area[l - 1] += 1;
        }
    }
    for (int i = 0; i < mask.component_count; ++i) {
        if (area[i] > static_cast<std::uint64_t>(config.max_area_px)) continue;
        if (wsum[i] <= 0.0) continue;
        MarkerDetection d;
        d.row_px = wr[i] / wsum[i];
        d.col_px = wc[i] / wsum[i];
        d.confidence = std::clamp(wsum[i] / (255.0 * static_cast<double>(area[i])), 0.0, 1.0);
        set.detections.push_back(d);
    }

    // Match each detection to its nearest nominal node within the capture
    // radius; one detection per node, nearest wins, ties broken by lower
    // row then lower column.
    double capture = marker_capture_radius(geom);
    std::vector<double> best(static_cast<std::size_t>(kMarkerCount),
                             std::numeric_limits<double>::infinity());
    std::vector<int> winner(static_cast<std::size_t>(kMarkerCount), -1);
    for (std::size_t i = 0; i < set.detections.size(); ++i) {
        MarkerDetection& d = set.detections[i];
        int best_node = -1;
        double best_d = capture;
        for (int gr = 0; gr < kMarkerRows; ++gr) {
            for (int gc = 0; gc < kMarkerCols; ++gc) {
                auto [nr, nc] = marker_nominal_px(geom, gr, gc);
                double dist = std::hypot(d.row_px - nr, d.col_px - nc);
                if (dist <= best_d) {
                    best_d = dist;
                    best_node = ShearField::node_index(gr, gc);
                }
            }
        }
        if (best_node < 0) continue;
        bool take = best_d < best[best_node];
        if (best_d == best[best_node] && winner[best_node] >= 0) {
            const MarkerDetection& cur = set.detections[winner[best_node]];
            take = d.row_px < cur.row_px ||
                   (d.row_px == cur.row_px && d.col_px < cur.col_px);
        }
        if (take) {
            if (winner[best_node] >= 0) set.detections[winner[best_node]].node = -1;
            best[best_node] = best_d;
            winner[best_node] = static_cast<int>(i);
            d.node = best_node;
        }
    }
    return set;
}

// Displacement of every matched node: current centroid minus rest
// centroid, flagged detected; nodes missing in either set are left for
// interpolation (flagged interpolated, zero placeholder vector).
inline ShearField track_displacements(const MarkerSet& rest, const MarkerSet& current)
{
    if (rest.detections.empty())
        throw tracking_error("track_displacements: empty rest marker set");
    ShearField field;
    field.timestamp = current.timestamp;
    for (int node = 0; node < kMarkerCount; ++node) {
        const MarkerDetection* r = rest.find_node(node);
        const MarkerDetection* c = current.find_node(node);
        ShearVector v;
        if (r && c) {
            v.dx_px = c->col_px - r->col_px;
            v.dy_px = c->row_px - r->row_px;
            v.provenance = VectorProvenance::Detected;
        } else {
            v.provenance = VectorProvenance::Interpolated;
        }
        field.vectors[node] = v;
    }
    return field;
}

inline int count_detected(const ShearField& field)
{
    int n = 0;
    for (const ShearVector& v : field.vectors)
        n += (v.provenance == VectorProvenance::Detected);
    return n;
}

// Fill missing nodes by inverse-distance-weighted average (power 2) of
// the k = 4 nearest detected vectors; detected vectors are not touched.
inline ShearField interpolate_missing(const ShearField& field,
                                      const SceneGeometry& geom = SceneGeometry::sensor_matched(),
                                      int k_neighbors = 4)
{
    int n_detected = count_detected(field);
    if (n_detected < 3)
        throw interpolation_error("interpolate_missing: need at least 3 detected vectors");

    std::vector<std::pair<double, double>> pos(static_cast<std::size_t>(kMarkerCount));
    for (int gr = 0; gr < kMarkerRows; ++gr)
        for (int gc = 0; gc < kMarkerCols; ++gc)
            pos[static_cast<std::size_t>(ShearField::node_index(gr, gc))] =
                marker_nominal_px(geom, gr, gc);

    ShearField out = field;
    for (int node = 0; node < kMarkerCount; ++node) {
        if (field.vectors[node].provenance == VectorProvenance::Detected) continue;
        std::vector<std::pair<double, int>> dist; // (distance, node)
        dist.reserve(static_cast<std::size_t>(n_detected));
        for (int other = 0; other < kMarkerCount; ++other) {
            if (field.vectors[other].provenance != VectorProvenance::Detected) continue;
            double d = std::hypot(pos[node].first - pos[other].first,
                                  pos[node].second - pos[other].second);
            dist.emplace_back(d, other);
        }
        int k = std::min<int>(k_neighbors, static_cast<int>(dist.size()));
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        double wsum = 0.0, dx = 0.0, dy = 0.0;
        for (int i = 0; i < k; ++i) {
            double w = 1.0 / (dist[i].first * dist[i].first);
            wsum += w;
            dx += w * field.vectors[dist[i].second].dx_px;
            dy += w * field.vectors[dist[i].second].dy_px;
        }
        out.vectors[node].dx_px = dx / wsum;
        out.vectors[node].dy_px = dy / wsum;
        out.vectors[node].provenance = VectorProvenance::Interpolated;
    }
    return out;
}

// Arrow overlay: red for detected vectors, pink for interpolated ones;
// arrow length is |v| * gain from the nominal node.
inline ImageRGB8 render_shear_overlay(const TactileFrame& frame, const ShearField& field,
                                      const SceneGeometry& geom = SceneGeometry::sensor_matched(),
                                      double gain = 3.0)
{
    ImageRGB8 img = frame.pixels;
    for (int gr = 0; gr < kMarkerRows; ++gr) {
        for (int gc = 0; gc < kMarkerCols; ++gc) {
            int node = ShearField::node_index(gr, gc);
            const ShearVector& v = field.vectors[node];
            auto [nr, nc] = marker_nominal_px(geom, gr, gc);
            Color color = v.provenance == VectorProvenance::Detected ? kRed : kPink;
            draw_arrow(img, nr, nc, nr + v.dy_px * gain, nc + v.dx_px * gain, color);
        }
    }
    return img;
}

inline void write_shear_csv(const std::string& path, const ShearField& field)
{
    CsvWriter csv(path);
    csv.header({"node_row", "node_col", "dx_px", "dy_px", "provenance"});
    for (int gr = 0; gr < kMarkerRows; ++gr) {
        for (int gc = 0; gc < kMarkerCols; ++gc) {
            const ShearVector& v = field.vectors[ShearField::node_index(gr, gc)];
            csv.field(gr).field(gc).field(v.dx_px).field(v.dy_px);
            csv.field(v.provenance == VectorProvenance::Detected ? "detected" : "interpolated");
            csv.end_row();
        }
    }
}

} // namespace tacsole
