#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "tacsole/csv.hpp"
#include "tacsole/image.hpp"
#include "tacsole/pnm.hpp"
#include "tacsole/rng.hpp"

using namespace tacsole;

namespace {

ImageRGB8 random_image(int w, int h, std::uint64_t seed)
{
    ImageRGB8 img(w, h);
    Rng rng = make_rng(seed);
    for (std::uint8_t& p : img.px) p = static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
    return img;
}

TactileFrame frame_of(ImageRGB8 img)
{
    TactileFrame f;
    f.pixels = std::move(img);
    return f;
}

} // namespace

TEST_CASE("luminance matches the Rec.601 weights")
{
    CHECK(luminance(100, 100, 100) == 100);
    CHECK(luminance(255, 255, 255) == 255);
    CHECK(luminance(255, 0, 0) == 76);   // round(76.245)
    CHECK(luminance(0, 255, 0) == 150);  // round(149.685)
    CHECK(luminance(0, 0, 255) == 29);   // round(29.07)
}

TEST_CASE("crop_roi produces the sensor ROI from a full frame")
{
    SensorGeometry geom;
    TactileFrame full = frame_of(random_image(640, 480, 7));
    TactileFrame roi = crop_roi(full, geom);
    CHECK(roi.width() == 114);
    CHECK(roi.height() == 143);

    // Pixels are copied unchanged from the centered rectangle.
    RoiRect rect = centered_roi(640, 480, geom);
    for (int r : {0, 50, 142})
        for (int c : {0, 60, 113})
            for (int ch = 0; ch < 3; ++ch)
                CHECK(roi.pixels.at(r, c, ch) == full.pixels.at(r + rect.row0, c + rect.col0, ch));
}

TEST_CASE("crop with ROI equal to the frame is the identity, and idempotent")
{
    SensorGeometry geom;
    TactileFrame roi_sized = frame_of(random_image(geom.roi_width, geom.roi_height, 9));
    TactileFrame once = crop_roi(roi_sized, geom);
    CHECK(once.pixels.px == roi_sized.pixels.px);
    TactileFrame twice = crop_roi(once, geom);
    CHECK(twice.pixels.px == once.pixels.px);
}

TEST_CASE("crop beyond the frame bounds is a geometry error")
{
    SensorGeometry geom;
    TactileFrame full = frame_of(random_image(640, 480, 7));
    RoiRect bad = centered_roi(640, 480, geom);
    bad.col0 = 640 - geom.roi_width + 1; // one column past the right edge
    CHECK_THROWS_AS(crop_roi(full, geom, &bad), geometry_error);

    TactileFrame small = frame_of(random_image(100, 100, 3));
    CHECK_THROWS_AS(crop_roi(small, geom), geometry_error);
}

TEST_CASE("diff_reference of a frame with itself is identically zero")
{
    TactileFrame f = frame_of(random_image(114, 143, 21));
    DiffImage d = diff_reference(f, f);
    for (std::uint8_t v : d.values.px) CHECK(v == 0);
}

TEST_CASE("diff_reference of uniform frames is the constant offset")
{
    ImageRGB8 a(50, 40, 100), b(50, 40, 130);
    DiffImage d = diff_reference(frame_of(b), frame_of(a));
    for (std::uint8_t v : d.values.px) CHECK(v == 30);
}

TEST_CASE("diff_reference equals the brute-force per-pixel loop")
{
    TactileFrame f = frame_of(random_image(114, 143, 100));
    TactileFrame ref = frame_of(random_image(114, 143, 101));
    DiffImage d = diff_reference(f, ref);
    for (int r = 0; r < 143; ++r) {
        for (int c = 0; c < 114; ++c) {
            int ya = luminance(f.pixels.at(r, c, 0), f.pixels.at(r, c, 1), f.pixels.at(r, c, 2));
            int yb = luminance(ref.pixels.at(r, c, 0), ref.pixels.at(r, c, 1),
                               ref.pixels.at(r, c, 2));
            int expected = ya > yb ? ya - yb : yb - ya;
            REQUIRE(static_cast<int>(d.values.at(r, c)) == expected);
        }
    }
}

TEST_CASE("diff_reference rejects mismatched dimensions")
{
    TactileFrame a = frame_of(random_image(40, 40, 1));
    TactileFrame b = frame_of(random_image(40, 41, 2));
    CHECK_THROWS_AS(diff_reference(a, b), geometry_error);
}

TEST_CASE("P6 and P5 rasters round-trip byte-exactly")
{
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "tacsole_pnm_test";
    fs::create_directories(dir);

    ImageRGB8 rgb = random_image(31, 17, 5);
    write_p6((dir / "a.ppm").string(), rgb);
    ImageRGB8 rgb2 = read_p6((dir / "a.ppm").string());
    CHECK(rgb2.width == rgb.width);
    CHECK(rgb2.px == rgb.px);

    ImageGray8 gray(23, 11);
    Rng rng = make_rng(12);
    for (std::uint8_t& p : gray.px) p = static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
    write_p5((dir / "b.pgm").string(), gray);
    ImageGray8 gray2 = read_p5((dir / "b.pgm").string());
    CHECK(gray2.px == gray.px);

    std::vector<std::uint16_t> deep(23 * 11);
    for (std::uint16_t& p : deep) p = static_cast<std::uint16_t>(uniform_int(rng, 0, 65535));
    write_p5_16((dir / "c.pgm").string(), deep, 23, 11);
    int w = 0, h = 0;
    std::vector<std::uint16_t> deep2 = read_p5_16((dir / "c.pgm").string(), w, h);
    CHECK(w == 23);
    CHECK(h == 11);
    CHECK(deep2 == deep);

    fs::remove_all(dir);
}

TEST_CASE("csv writer emits the exact rows it was given")
{
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "tacsole_csv_test.csv";
    {
        CsvWriter csv(path.string());
        csv.header({"a", "b", "c"});
        csv.field(1).field(2.5).field("x");
        csv.end_row();
    }
    auto rows = read_csv(path.string());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1] == std::vector<std::string>{"1", "2.5", "x"});
    fs::remove(path);
}
