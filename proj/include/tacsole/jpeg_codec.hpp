#pragma once

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <vector>

#include <jpeglib.h>

#include "tacsole/errors.hpp"
#include "tacsole/image.hpp"

// Thin RAII wrappers over libjpeg for MJPEG stream parts and .jpg replay
// files. Malformed data throws io_error instead of calling exit().

namespace tacsole {

namespace detail {

struct JpegErrorMgr {
    jpeg_error_mgr base;
    std::jmp_buf jump;
};

inline void jpeg_error_exit(j_common_ptr cinfo)
{
    JpegErrorMgr* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

inline void jpeg_silence(j_common_ptr, int) {}

} // namespace detail

inline ImageRGB8 decode_jpeg(const std::uint8_t* data, std::size_t size)
{
    jpeg_decompress_struct cinfo;
    detail::JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = detail::jpeg_error_exit;
    err.base.emit_message = detail::jpeg_silence;

    ImageRGB8 img;
    jpeg_create_decompress(&cinfo);
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw io_error("jpeg: malformed data");
    }
    jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
    if (jpeg_read_header(&cinfo, TRUE) != JPEG_HEADER_OK) {
        jpeg_destroy_decompress(&cinfo);
        throw io_error("jpeg: bad header");
    }
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    img = ImageRGB8(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = &img.px[static_cast<std::size_t>(cinfo.output_scanline) * img.width * 3];
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

inline ImageRGB8 decode_jpeg(const std::vector<std::uint8_t>& bytes)
{
    return decode_jpeg(bytes.data(), bytes.size());
}

inline std::vector<std::uint8_t> encode_jpeg(const ImageRGB8& img, int quality = 92)
{
    jpeg_compress_struct cinfo;
    detail::JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = detail::jpeg_error_exit;
    err.base.emit_message = detail::jpeg_silence;

    unsigned char* buffer = nullptr;
    unsigned long buffer_size = 0;
    jpeg_create_compress(&cinfo);
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        if (buffer) std::free(buffer);
        throw io_error("jpeg: encode failed");
    }
    jpeg_mem_dest(&cinfo, &buffer, &buffer_size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    std::vector<std::uint8_t> mutable_px = img.px; // libjpeg wants non-const rows
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = &mutable_px[static_cast<std::size_t>(cinfo.next_scanline) * img.width * 3];
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    std::vector<std::uint8_t> out(buffer, buffer + buffer_size);
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    return out;
}

} // namespace tacsole
