#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "tacsole/image.hpp"

// Small rasterizer for diagnostic overlays: lines, arrows, ellipses.

namespace tacsole {

struct Color {
    std::uint8_t r = 0, g = 0, b = 0;
};

inline constexpr Color kRed{220, 30, 30};
inline constexpr Color kPink{255, 150, 190};
inline constexpr Color kGreen{40, 200, 70};
inline constexpr Color kBlue{60, 90, 230};
inline constexpr Color kYellow{240, 220, 60};

inline void put_px(ImageRGB8& img, int row, int col, Color c)
{
    if (row < 0 || row >= img.height || col < 0 || col >= img.width) return;
    img.at(row, col, 0) = c.r;
    img.at(row, col, 1) = c.g;
    img.at(row, col, 2) = c.b;
}

inline void draw_line(ImageRGB8& img, double r0, double c0, double r1, double c1, Color color)
{
    double dr = r1 - r0, dc = c1 - c0;
    int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(dr), std::abs(dc)))));
    for (int i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) / steps;
        put_px(img, static_cast<int>(std::lround(r0 + t * dr)),
               static_cast<int>(std::lround(c0 + t * dc)), color);
    }
}

inline void draw_hline(ImageRGB8& img, int row, Color color)
{
    if (row < 0 || row >= img.height) return;
    for (int c = 0; c < img.width; ++c) put_px(img, row, c, color);
}

inline void draw_arrow(ImageRGB8& img, double r0, double c0, double r1, double c1, Color color)
{
    draw_line(img, r0, c0, r1, c1, color);
    double dr = r1 - r0, dc = c1 - c0;
    double len = std::hypot(dr, dc);
    if (len >= 2.0) {
        double ur = dr / len, uc = dc / len;
        double head = std::min(3.0, len / 2.0);
        // two barbs at +-30 degrees off the shaft
        double ca = std::cos(2.62), sa = std::sin(2.62); // pi - 30 deg
        draw_line(img, r1, c1, r1 + head * (ur * ca - uc * sa), c1 + head * (uc * ca + ur * sa),
                  color);
        draw_line(img, r1, c1, r1 + head * (ur * ca + uc * sa), c1 + head * (uc * ca - ur * sa),
                  color);
    }
    put_px(img, static_cast<int>(std::lround(r0)), static_cast<int>(std::lround(c0)), color);
}

inline void draw_ellipse(ImageRGB8& img, double cr, double cc, double semi_major,
                         double semi_minor, double angle_deg, Color color)
{
    double a = angle_deg * 3.14159265358979323846 / 180.0;
    double ca = std::cos(a), sa = std::sin(a);
    int steps = 90;
    double pr = 0, pc = 0;
    for (int i = 0; i <= steps; ++i) {
        double t = 2.0 * 3.14159265358979323846 * i / steps;
        double u = semi_major * std::cos(t), v = semi_minor * std::sin(t);
        double col = cc + u * ca - v * sa;
        double row = cr + u * sa + v * ca;
        if (i > 0) draw_line(img, pr, pc, row, col, color);
        pr = row;
        pc = col;
    }
}

} // namespace tacsole
