#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "tacsole/errors.hpp"
#include "tacsole/image.hpp"

// Binary portable-pixmap I/O: P6 for color, P5 for grayscale. 16-bit P5
// (big-endian sample order, per the netpbm convention) carries depth maps.

namespace tacsole {

namespace detail {

inline void skip_pnm_whitespace(std::istream& in)
{
    int c = in.peek();
    while (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            in.get();
        }
        c = in.peek();
    }
}

inline int read_pnm_int(std::istream& in)
{
    skip_pnm_whitespace(in);
    int value = 0;
    if (!(in >> value)) throw io_error("pnm: malformed header");
    return value;
}

} // namespace detail

inline void write_p6(const std::string& path, const ImageRGB8& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("pnm: cannot open for writing: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.px.data()),
              static_cast<std::streamsize>(img.px.size()));
    if (!out) throw io_error("pnm: short write: " + path);
}

inline void write_p5(const std::string& path, const ImageGray8& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("pnm: cannot open for writing: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.px.data()),
              static_cast<std::streamsize>(img.px.size()));
    if (!out) throw io_error("pnm: short write: " + path);
}

// 16-bit graymap, big-endian samples.
inline void write_p5_16(const std::string& path, const std::vector<std::uint16_t>& samples,
                        int width, int height)
{
    if (samples.size() != static_cast<std::size_t>(width) * height)
        throw io_error("pnm: sample count does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("pnm: cannot open for writing: " + path);
    out << "P5\n" << width << " " << height << "\n65535\n";
    std::vector<std::uint8_t> bytes(samples.size() * 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        bytes[2 * i] = static_cast<std::uint8_t>(samples[i] >> 8);
        bytes[2 * i + 1] = static_cast<std::uint8_t>(samples[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("pnm: short write: " + path);
}

inline ImageRGB8 read_p6(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("pnm: cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P6") throw io_error("pnm: not a P6 file: " + path);
    int w = detail::read_pnm_int(in);
    int h = detail::read_pnm_int(in);
    int maxval = detail::read_pnm_int(in);
    if (w < 1 || h < 1 || maxval != 255) throw io_error("pnm: unsupported P6 header: " + path);
    in.get(); // single whitespace after maxval
    ImageRGB8 img(w, h);
    in.read(reinterpret_cast<char*>(img.px.data()), static_cast<std::streamsize>(img.px.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.px.size()))
        throw io_error("pnm: truncated pixel data: " + path);
    return img;
}

inline ImageGray8 read_p5(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("pnm: cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw io_error("pnm: not a P5 file: " + path);
    int w = detail::read_pnm_int(in);
    int h = detail::read_pnm_int(in);
    int maxval = detail::read_pnm_int(in);
    if (w < 1 || h < 1 || maxval != 255) throw io_error("pnm: unsupported P5 header: " + path);
    in.get();
    ImageGray8 img(w, h);
    in.read(reinterpret_cast<char*>(img.px.data()), static_cast<std::streamsize>(img.px.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.px.size()))
        throw io_error("pnm: truncated pixel data: " + path);
    return img;
}

inline std::vector<std::uint16_t> read_p5_16(const std::string& path, int& width, int& height)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("pnm: cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw io_error("pnm: not a P5 file: " + path);
    width = detail::read_pnm_int(in);
    height = detail::read_pnm_int(in);
    int maxval = detail::read_pnm_int(in);
    if (width < 1 || height < 1 || maxval != 65535)
        throw io_error("pnm: expected 16-bit P5: " + path);
    in.get();
    std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> bytes(n * 2);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw io_error("pnm: truncated pixel data: " + path);
    std::vector<std::uint16_t> samples(n);
    for (std::size_t i = 0; i < n; ++i)
        samples[i] = static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
    return samples;
}

} // namespace tacsole
