#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tacsole/blob.hpp"
#include "tacsole/synth.hpp"

using namespace tacsole;

TEST_CASE("empty scene renders the flat reference image with zero depth")
{
    IndenterScene scene;
    scene.geom = SceneGeometry::calibration();
    ShadingModel shading;
    IndentationRender r = render_indentation(scene, shading);
    TactileFrame ref = render_reference(scene.geom, shading);
    CHECK(r.frame.pixels.px == ref.pixels.px);
    for (double z : r.truth.depth.v) CHECK(z == 0.0);
    for (std::uint8_t m : r.truth.contact_mask) CHECK(m == 0);
}

TEST_CASE("sphere contact disk radius follows the sphere-plane intersection")
{
    // 4 mm sphere (radius 2 mm) pressed 1 mm deep: the contact disk has
    // radius sqrt(r^2 - (r - d)^2) = sqrt(3) mm.
    SphereIndenter sphere;
    sphere.radius_mm = 2.0;
    sphere.depth_mm = 1.0;
    double a = sphere.contact_radius_mm();
    CHECK(a == Catch::Approx(std::sqrt(3.0)).epsilon(1e-12));

    SceneGeometry geom = SceneGeometry::calibration();
    sphere.x_mm = 28.0;
    sphere.y_mm = 35.0;
    IndenterScene scene;
    scene.geom = geom;
    scene.indenters.push_back(sphere);
    IndentationRender r = render_indentation(scene);

    // Oracle: the mask is exactly the set of pixels whose distance from
    // the center is below the analytic contact radius.
    for (int row = 0; row < geom.height_px; ++row) {
        for (int col = 0; col < geom.width_px; ++col) {
            double x = col * geom.pitch_col_mm, y = row * geom.pitch_row_mm;
            double rho = std::hypot(x - sphere.x_mm, y - sphere.y_mm);
            if (rho < a - 1e-9) REQUIRE(r.truth.mask_at(row, col));
            if (rho > a + 1e-9) REQUIRE_FALSE(r.truth.mask_at(row, col));
        }
    }

    // Depth at the apex equals the indentation depth.
    int apex_row = static_cast<int>(std::lround(sphere.y_mm / geom.pitch_row_mm));
    int apex_col = static_cast<int>(std::lround(sphere.x_mm / geom.pitch_col_mm));
    CHECK(r.truth.depth.at(apex_row, apex_col) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("ground-truth gradients are the exact central differences of depth")
{
    SceneGeometry geom = SceneGeometry::calibration();
    IndenterScene scene;
    scene.geom = geom;
    scene.indenters.push_back(SphereIndenter{20.0, 30.0, 2.0, 0.8});
    scene.indenters.push_back(BoxIndenter{40.0, 50.0, 6.0, 2.0, 25.0, 0.5, 0.4});
    IndentationRender r = render_indentation(scene);

    const FieldF64& z = r.truth.depth;
    for (int row = 0; row < geom.height_px; ++row) {
        for (int col = 0; col < geom.width_px; ++col) {
            double gx, gy;
            if (col == 0)
                gx = (z.at(row, 1) - z.at(row, 0)) / geom.pitch_col_mm;
            else if (col == geom.width_px - 1)
                gx = (z.at(row, col) - z.at(row, col - 1)) / geom.pitch_col_mm;
            else
                gx = (z.at(row, col + 1) - z.at(row, col - 1)) / (2.0 * geom.pitch_col_mm);
            if (row == 0)
                gy = (z.at(1, col) - z.at(0, col)) / geom.pitch_row_mm;
            else if (row == geom.height_px - 1)
                gy = (z.at(row, col) - z.at(row - 1, col)) / geom.pitch_row_mm;
            else
                gy = (z.at(row + 1, col) - z.at(row - 1, col)) / (2.0 * geom.pitch_row_mm);
            REQUIRE(r.truth.gx.at(row, col) == gx);
            REQUIRE(r.truth.gy.at(row, col) == gy);
        }
    }

    // Contact mask is exactly depth > 0.
    for (std::size_t i = 0; i < z.v.size(); ++i)
        REQUIRE((r.truth.contact_mask[i] != 0) == (z.v[i] > 0.0));
}

TEST_CASE("rendering is a pure function of scene and seed")
{
    IndenterScene scene;
    scene.geom = SceneGeometry::calibration();
    scene.indenters.push_back(SphereIndenter{25.0, 30.0, 2.0, 0.6});
    scene.noise_sigma = 3.0;
    scene.seed = 42;
    IndentationRender a = render_indentation(scene);
    IndentationRender b = render_indentation(scene);
    CHECK(a.frame.pixels.px == b.frame.pixels.px);

    // Noise-free rendering ignores the seed entirely.
    scene.noise_sigma = 0.0;
    scene.seed = 1;
    IndentationRender c = render_indentation(scene);
    scene.seed = 999;
    IndentationRender d = render_indentation(scene);
    CHECK(c.frame.pixels.px == d.frame.pixels.px);
}

TEST_CASE("primitive outside the ROI is a scene error")
{
    IndenterScene scene;
    scene.geom = SceneGeometry::calibration();
    scene.indenters.push_back(SphereIndenter{0.5, 30.0, 2.0, 1.0}); // disk leaves the pad
    CHECK_THROWS_AS(render_indentation(scene), scene_error);
}

TEST_CASE("marker grid at rest puts every marker on its nominal node")
{
    std::vector<std::pair<double, double>> zero(kMarkerCount, {0.0, 0.0});
    MarkerRender r = render_marker_grid(zero, 0.0, 3);
    CHECK(r.occluded_nodes.empty());
    for (const ShearVector& v : r.truth.vectors) {
        CHECK(v.dx_px == 0.0);
        CHECK(v.dy_px == 0.0);
        CHECK(v.provenance == VectorProvenance::Detected);
    }
}

TEST_CASE("marker dropout occludes round(dropout * 126) markers")
{
    std::vector<std::pair<double, double>> zero(kMarkerCount, {0.0, 0.0});
    MarkerRender r = render_marker_grid(zero, 0.1, 5);
    CHECK(r.occluded_nodes.size() == 13); // lround(0.1 * 126)
    int flagged = 0;
    for (const ShearVector& v : r.truth.vectors)
        flagged += (v.provenance == VectorProvenance::Interpolated);
    CHECK(flagged == 13);
}

TEST_CASE("marker grid rejects a wrong displacement count")
{
    std::vector<std::pair<double, double>> wrong(100, {0.0, 0.0});
    CHECK_THROWS_AS(render_marker_grid(wrong, 0.0, 1), scene_error);
}

TEST_CASE("uniform displacement moves every ground-truth vector")
{
    std::vector<std::pair<double, double>> shift(kMarkerCount, {3.0, -2.0});
    MarkerRender r = render_marker_grid(shift, 0.0, 7);
    for (const ShearVector& v : r.truth.vectors) {
        CHECK(v.dx_px == 3.0);
        CHECK(v.dy_px == -2.0);
    }
}

TEST_CASE("blank terrain has an empty contact mask")
{
    TerrainRender r = render_terrain(TerrainClass::Blank, false, 11);
    for (std::uint8_t m : r.truth.contact_mask) CHECK(m == 0);
    CHECK(r.label == TerrainClass::Blank);
}

TEST_CASE("spike terrain fits floor(extent/pitch) centers per axis")
{
    // 58 mm x 90 mm pad on a 12.5 mm grid: 4 columns x 7 rows = 28 spikes.
    TerrainRender r = render_terrain(TerrainClass::Spike, false, 23);
    ContactMask blobs = label_components(
        r.truth.depth.width, r.truth.depth.height,
        [&](int row, int col) { return r.truth.mask_at(row, col); }, 1);
    CHECK(blobs.component_count == 28);
}

TEST_CASE("tile terrain blob areas match the tile size at the configured pitch")
{
    TerrainSceneConfig config;
    TerrainRender r = render_terrain(TerrainClass::Tile, false, 31, config);
    ContactMask blobs = label_components(
        r.truth.depth.width, r.truth.depth.height,
        [&](int row, int col) { return r.truth.mask_at(row, col); }, 1);
    REQUIRE(blobs.component_count == 6); // floor(58/25) x floor(90/25)
    std::vector<BlobStats> stats = blob_stats(blobs);
    double expected = (config.tile_size_mm / config.geom.pitch_row_mm) *
                      (config.tile_size_mm / config.geom.pitch_col_mm);
    for (const BlobStats& s : stats) {
        CHECK(static_cast<double>(s.area) > 0.8 * expected);
        CHECK(static_cast<double>(s.area) < 1.2 * expected);
    }
}

TEST_CASE("textured press renders dark blobs around the pressed spot")
{
    PressSceneConfig config;
    double center_row = (config.geom.height_px - 1) / 2.0;
    double center_col = (config.geom.width_px - 1) / 2.0;
    PressRender r = render_textured_press(center_row, center_col, 17, config);
    CHECK(r.visible_cylinders > 4);
    CHECK(r.true_cop_row == Catch::Approx(center_row).margin(3.0));
    CHECK(r.true_cop_col == Catch::Approx(center_col).margin(3.0));
}
