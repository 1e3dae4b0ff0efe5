#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "tacsole/image.hpp"

namespace tacsole {

// Labeled binary mask. Labels run 1..component_count; 0 is background.
// Components are relabeled in descending area order after the area filter.
struct ContactMask {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;
    int component_count = 0;

    ContactMask() = default;
    ContactMask(int w, int h)
        : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0)
    {
    }

    std::int32_t label(int row, int col) const
    {
        return labels[static_cast<std::size_t>(row) * width + col];
    }
    bool set(int row, int col) const { return label(row, col) != 0; }
    std::size_t set_count() const
    {
        std::size_t n = 0;
        for (std::int32_t l : labels) n += (l != 0);
        return n;
    }
};

// Per-component raw and central moments, accumulated in exact integer
// arithmetic; the derived quantities are computed on demand.
struct BlobStats {
    std::int32_t label = 0;
    std::uint64_t area = 0;      // m00
    std::uint64_t sum_row = 0;   // m01 over rows
    std::uint64_t sum_col = 0;   // m10 over cols
    std::uint64_t sum_rr = 0;
    std::uint64_t sum_cc = 0;
    std::uint64_t sum_rc = 0;
    int min_row = 0, max_row = 0, min_col = 0, max_col = 0;

    double centroid_row() const { return static_cast<double>(sum_row) / static_cast<double>(area); }
    double centroid_col() const { return static_cast<double>(sum_col) / static_cast<double>(area); }
    // Central second moments per pixel (variance units, px^2).
    double mu_rr() const
    {
        double cr = centroid_row();
        return static_cast<double>(sum_rr) / static_cast<double>(area) - cr * cr;
    }
    double mu_cc() const
    {
        double cc = centroid_col();
        return static_cast<double>(sum_cc) / static_cast<double>(area) - cc * cc;
    }
    double mu_rc() const
    {
        return static_cast<double>(sum_rc) / static_cast<double>(area) -
               centroid_row() * centroid_col();
    }
};

// 8-connected component labeling of pred(pixel); components smaller than
// min_area are dropped and the survivors are relabeled largest-first.
template <class Pred>
ContactMask label_components(int width, int height, Pred pred, int min_area = 0)
{
    ContactMask mask(width, height);
    std::vector<std::int32_t>& lab = mask.labels;
    std::vector<std::size_t> stack;
    std::int32_t next = 0;
    std::vector<std::uint64_t> areas; // per provisional label

    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            std::size_t idx = static_cast<std::size_t>(r) * width + c;
            if (lab[idx] != 0 || !pred(r, c)) continue;
            ++next;
            std::uint64_t area = 0;
            lab[idx] = next;
            stack.push_back(idx);
            while (!stack.empty()) {
                std::size_t cur = stack.back();
                stack.pop_back();
                ++area;
                int cr = static_cast<int>(cur / width);
                int cc = static_cast<int>(cur % width);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        int nr = cr + dr, nc = cc + dc;
                        if (nr < 0 || nr >= height || nc < 0 || nc >= width) continue;
                        std::size_t nidx = static_cast<std::size_t>(nr) * width + nc;
                        if (lab[nidx] == 0 && pred(nr, nc)) {
                            lab[nidx] = next;
                            stack.push_back(nidx);
                        }
                    }
                }
            }
            areas.push_back(area);
        }
    }

    // Area filter + relabel, largest first; ties keep scan order.
    std::vector<std::int32_t> order;
    for (std::int32_t l = 1; l <= next; ++l)
        if (areas[l - 1] >= static_cast<std::uint64_t>(min_area)) order.push_back(l);
    std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return areas[a - 1] > areas[b - 1];
    });
    std::vector<std::int32_t> remap(static_cast<std::size_t>(next) + 1, 0);
    for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<std::int32_t>(i + 1);
    for (std::int32_t& l : lab) l = remap[l];
    mask.component_count = static_cast<int>(order.size());
    return mask;
}

inline std::vector<BlobStats> blob_stats(const ContactMask& mask)
{
    std::vector<BlobStats> stats(static_cast<std::size_t>(mask.component_count));
    for (int i = 0; i < mask.component_count; ++i) {
        stats[i].label = i + 1;
        stats[i].min_row = mask.height;
        stats[i].min_col = mask.width;
        stats[i].max_row = -1;
        stats[i].max_col = -1;
    }
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            std::int32_t l = mask.label(r, c);
            if (l == 0) continue;
            BlobStats& s = stats[l - 1];
            s.area += 1;
            s.sum_row += static_cast<std::uint64_t>(r);
            s.sum_col += static_cast<std::uint64_t>(c);
            s.sum_rr += static_cast<std::uint64_t>(r) * r;
            s.sum_cc += static_cast<std::uint64_t>(c) * c;
            s.sum_rc += static_cast<std::uint64_t>(r) * c;
            s.min_row = std::min(s.min_row, r);
            s.max_row = std::max(s.max_row, r);
            s.min_col = std::min(s.min_col, c);
            s.max_col = std::max(s.max_col, c);
        }
    }
    return stats;
}

} // namespace tacsole
