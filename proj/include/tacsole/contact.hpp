#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tacsole/blob.hpp"
#include "tacsole/csv.hpp"
#include "tacsole/draw.hpp"
#include "tacsole/image.hpp"

// Contact-patch position and orientation from frame differencing,
// connected components and second-order image moments. The ellipse
// summary is the moment-equivalent ellipse of the filled region.

namespace tacsole {

struct ContactSegmentConfig {
    int threshold = 25;  // gray levels of reference difference
    int min_area_px = 20;
};

// Pixels whose difference is >= threshold, 8-connected, small components
// dropped.
inline ContactMask segment_contact(const DiffImage& diff, const ContactSegmentConfig& config = {})
{
    const ImageGray8& d = diff.values;
    return label_components(
        d.width, d.height,
        [&](int r, int c) { return static_cast<int>(d.at(r, c)) >= config.threshold; },
        config.min_area_px);
}

struct ContactPose {
    int component = 0;       // 1-based label, ordered by descending area
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    double orientation_deg = 0.0; // major axis, degrees from +col toward +row, [0, 180)
    double major_px = 0.0;        // full axis lengths of the moment ellipse
    double minor_px = 0.0;
    std::uint64_t area_px = 0;
    int bbox_min_row = 0, bbox_max_row = 0, bbox_min_col = 0, bbox_max_col = 0;
    bool degenerate = false; // near-isotropic patch, orientation ill-defined
};

struct PoseConfig {
    // Degeneracy test on (mu20-mu02)^2 + 4*mu11^2 in px^4 (per-pixel
    // central moments). Near-isotropic patches get flagged instead of an
    // arbitrary angle.
    double degeneracy_epsilon = 0.25;
};

// Centroid and orientation per component from image moments; components
// come back ordered by descending area. An empty mask yields an empty
// list (no-contact), not an error.
inline std::vector<ContactPose> estimate_pose(const ContactMask& mask,
                                              const PoseConfig& config = PoseConfig{})
{
    std::vector<BlobStats> stats = blob_stats(mask);
    std::vector<ContactPose> poses;
    poses.reserve(stats.size());
    for (const BlobStats& s : stats) {
        ContactPose p;
        p.component = s.label;
        p.centroid_row = s.centroid_row();
        p.centroid_col = s.centroid_col();
        p.area_px = s.area;
        p.bbox_min_row = s.min_row;
        p.bbox_max_row = s.max_row;
        p.bbox_min_col = s.min_col;
        p.bbox_max_col = s.max_col;

        // x = col, y = row; 1/12 adds the unit-square footprint of each
        // pixel so a one-pixel-wide region keeps a nonzero minor axis.
        double mu20 = s.mu_cc() + 1.0 / 12.0;
        double mu02 = s.mu_rr() + 1.0 / 12.0;
        double mu11 = s.mu_rc();

        double aniso = (mu20 - mu02) * (mu20 - mu02) + 4.0 * mu11 * mu11;
        p.degenerate = aniso < config.degeneracy_epsilon;

        double theta = 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);
        double deg = theta * 180.0 / std::numbers::pi;
        if (deg < 0.0) deg += 180.0;
        if (deg >= 180.0) deg -= 180.0;
        p.orientation_deg = deg;

        double half_trace = 0.5 * (mu20 + mu02);
        double spread = 0.5 * std::sqrt(aniso);
        double lam1 = half_trace + spread;
        double lam2 = std::max(half_trace - spread, 0.0);
        p.major_px = 4.0 * std::sqrt(lam1);
        p.minor_px = 4.0 * std::sqrt(lam2);
        poses.push_back(p);
    }
    return poses;
}

inline void write_pose_csv(const std::string& path, const std::vector<ContactPose>& poses,
                           std::int64_t frame_index)
{
    CsvWriter csv(path);
    csv.header({"frame_index", "component", "centroid_row", "centroid_col", "orientation_deg",
                "major_px", "minor_px", "area_px", "degenerate"});
    for (const ContactPose& p : poses) {
        csv.field(frame_index)
            .field(p.component)
            .field(p.centroid_row)
            .field(p.centroid_col)
            .field(p.orientation_deg)
            .field(p.major_px)
            .field(p.minor_px)
            .field(static_cast<std::int64_t>(p.area_px))
            .field(p.degenerate ? 1 : 0);
        csv.end_row();
    }
}

inline ImageRGB8 render_pose_overlay(const TactileFrame& frame,
                                     const std::vector<ContactPose>& poses)
{
    ImageRGB8 img = frame.pixels;
    for (const ContactPose& p : poses) {
        draw_ellipse(img, p.centroid_row, p.centroid_col, p.major_px / 2.0, p.minor_px / 2.0,
                     p.orientation_deg, kYellow);
        draw_line(img, p.centroid_row - 2, p.centroid_col, p.centroid_row + 2, p.centroid_col,
                  kRed);
        draw_line(img, p.centroid_row, p.centroid_col - 2, p.centroid_row, p.centroid_col + 2,
                  kRed);
    }
    return img;
}

} // namespace tacsole
