#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tacsole/errors.hpp"
#include "tacsole/image.hpp"

// Depth reconstruction by Poisson integration: solve laplacian(z) = div(g)
// with a five-point stencil and conjugate gradient on the SPD system.

namespace tacsole {

// Per-pixel surface slope (dz/dx, dz/dy), unitless (height-mm per
// lateral-mm). Same raster dimensions as the source frame.
struct GradientField {
    FieldF64 gx;
    FieldF64 gy;

    int width() const { return gx.width; }
    int height() const { return gx.height; }
};

enum class DepthUnits { Millimeters, PixelHeight };

struct DepthMap {
    FieldF64 z;
    DepthUnits units = DepthUnits::PixelHeight;

    int width() const { return z.width; }
    int height() const { return z.height; }
};

enum class BoundaryCondition { Dirichlet, Neumann };

struct PoissonOptions {
    BoundaryCondition boundary = BoundaryCondition::Dirichlet;
    double tolerance = 1e-6; // relative residual
    int max_iterations = 10000;
    // Physical pixel pitch; gradients are unitless slope, so scaling by
    // the pitch turns them into height per pixel step and the solution
    // comes out in the gradient's height unit (mm for calibrated fields).
    double pitch_row_mm = 1.0;
    double pitch_col_mm = 1.0;
};

struct PoissonResult {
    DepthMap depth;
    bool converged = false; // true: residual stop fired; false: iteration cap
    int iterations = 0;
    double relative_residual = 0.0;
};

namespace detail {

// Divergence of the per-pixel-step gradient field, central differences in
// the interior and one-sided at the borders.
inline FieldF64 divergence(const GradientField& g, double pitch_row, double pitch_col)
{
    int w = g.width(), h = g.height();
    FieldF64 f(w, h, 0.0);
    auto gpx = [&](int r, int c) { return g.gx.at(r, c) * pitch_col; };
    auto gpy = [&](int r, int c) { return g.gy.at(r, c) * pitch_row; };
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double ddx, ddy;
            if (c == 0)
                ddx = gpx(r, 1) - gpx(r, 0);
            else if (c == w - 1)
                ddx = gpx(r, w - 1) - gpx(r, w - 2);
            else
                ddx = (gpx(r, c + 1) - gpx(r, c - 1)) / 2.0;
            if (r == 0)
                ddy = gpy(1, c) - gpy(0, c);
            else if (r == h - 1)
                ddy = gpy(h - 1, c) - gpy(h - 2, c);
            else
                ddy = (gpy(r + 1, c) - gpy(r - 1, c)) / 2.0;
            f.at(r, c) = ddx + ddy;
        }
    }
    return f;
}

} // namespace detail

// Solve the discrete Poisson equation for the height field. Dirichlet
// (z = 0 on the boundary ring) is the default; Neumann solves the
// all-pixel natural-boundary system and returns the mean-zero solution.
inline PoissonResult integrate_poisson(const GradientField& g, const PoissonOptions& opts = {})
{
    int w = g.width(), h = g.height();
    if (w < 3 || h < 3) throw numeric_error("integrate_poisson: field too small");
    if (!g.gx.same_size(g.gy)) throw numeric_error("integrate_poisson: gx/gy size mismatch");
    for (double v : g.gx.v)
        if (!std::isfinite(v)) throw numeric_error("integrate_poisson: non-finite gx");
    for (double v : g.gy.v)
        if (!std::isfinite(v)) throw numeric_error("integrate_poisson: non-finite gy");

    FieldF64 f = detail::divergence(g, opts.pitch_row_mm, opts.pitch_col_mm);

    PoissonResult result;
    result.depth.z = FieldF64(w, h, 0.0);
    result.depth.units =
        (opts.pitch_row_mm != 1.0 || opts.pitch_col_mm != 1.0) ? DepthUnits::Millimeters
                                                               : DepthUnits::PixelHeight;

    const bool dirichlet = opts.boundary == BoundaryCondition::Dirichlet;
    const int iw = dirichlet ? w - 2 : w; // unknown grid
    const int ih = dirichlet ? h - 2 : h;
    const std::size_t n = static_cast<std::size_t>(iw) * ih;

    std::vector<double> b(n), x(n, 0.0), r(n), p(n), ap(n);
    for (int i = 0; i < ih; ++i)
        for (int j = 0; j < iw; ++j) {
            int fr = dirichlet ? i + 1 : i;
            int fc = dirichlet ? j + 1 : j;
            b[static_cast<std::size_t>(i) * iw + j] = -f.at(fr, fc);
        }

    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int i = 0; i < ih; ++i) {
            for (int j = 0; j < iw; ++j) {
                std::size_t k = static_cast<std::size_t>(i) * iw + j;
                double center = in[k];
                double acc = 0.0;
                int deg = 0;
                if (i > 0) { acc += in[k - iw]; ++deg; }
                if (i < ih - 1) { acc += in[k + iw]; ++deg; }
                if (j > 0) { acc += in[k - 1]; ++deg; }
                if (j < iw - 1) { acc += in[k + 1]; ++deg; }
                // Dirichlet: missing neighbors are zero but still count.
                if (dirichlet) deg = 4;
                out[k] = deg * center - acc;
            }
        }
    };
    auto project_mean = [&](std::vector<double>& vec) {
        double mean = 0.0;
        for (double v : vec) mean += v;
        mean /= static_cast<double>(vec.size());
        for (double& v : vec) v -= mean;
    };

    if (!dirichlet) project_mean(b); // compatibility for the singular system

    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        result.converged = true;
        return result;
    }

    r = b;
    p = r;
    double rs = 0.0;
    for (double v : r) rs += v * v;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (std::sqrt(rs) / bnorm < opts.tolerance) break;
        apply(p, ap);
        double pap = 0.0;
        for (std::size_t k = 0; k < n; ++k) pap += p[k] * ap[k];
        if (pap == 0.0) break;
        double alpha = rs / pap;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if (!dirichlet) project_mean(r);
        double rs_new = 0.0;
        for (double v : r) rs_new += v * v;
        double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    }
    result.iterations = it;
    result.relative_residual = std::sqrt(rs) / bnorm;
    result.converged = result.relative_residual < opts.tolerance;

    if (!dirichlet) project_mean(x);
    for (int i = 0; i < ih; ++i)
        for (int j = 0; j < iw; ++j) {
            int fr = dirichlet ? i + 1 : i;
            int fc = dirichlet ? j + 1 : j;
            result.depth.z.at(fr, fc) = x[static_cast<std::size_t>(i) * iw + j];
        }
    return result;
}

} // namespace tacsole
