#include "matteforge/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

// jpeglib.h expects size_t and FILE to be declared first.
#include <jpeglib.h>

#include "matteforge/error.hpp"

namespace matteforge::io {

namespace {

bool is_png(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

Image from_rgb8(int width, int height, const std::vector<std::uint8_t>& rgb) {
    std::vector<float> data(rgb.size());
    for (size_t i = 0; i < rgb.size(); ++i) data[i] = float(rgb[i]) / 255.0f;
    return Image(width, height, std::move(data));
}

Image decode_png(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::IoError, std::string("png decode failed: ") + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error(ErrorCode::IoError, std::string("png decode failed: ") + image.message);
    }
    return from_rgb8(int(image.width), int(image.height), buffer);
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

Image decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct cinfo{};
    JpegErrorManager err{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    std::vector<std::uint8_t> rgb;
    int width = 0;
    int height = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw Error(ErrorCode::IoError, std::string("jpeg decode failed: ") + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = int(cinfo.output_width);
    height = int(cinfo.output_height);
    rgb.resize(size_t(width) * size_t(height) * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = rgb.data() + size_t(cinfo.output_scanline) * size_t(width) * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return from_rgb8(width, height, rgb);
}

Bytes encode_png_raw(int width, int height, std::uint32_t format, const std::uint8_t* pixels) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = png_uint_32(width);
    image.height = png_uint_32(height);
    image.format = format;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr)) {
        throw Error(ErrorCode::IoError, std::string("png encode failed: ") + image.message);
    }
    Bytes out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
        throw Error(ErrorCode::IoError, std::string("png encode failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

}  // namespace

Image decode_image(std::span<const std::uint8_t> bytes) {
    if (is_png(bytes)) return decode_png(bytes);
    if (is_jpeg(bytes)) return decode_jpeg(bytes);
    throw Error(ErrorCode::IoError, "unrecognized image format (expected PNG or JPEG)");
}

Image read_image(const std::filesystem::path& path) {
    const Bytes bytes = read_file(path);
    return decode_image(bytes);
}

Bytes encode_png(const Image& img) {
    std::vector<std::uint8_t> rgb(img.data().size());
    const auto d = img.data();
    for (size_t i = 0; i < d.size(); ++i) {
        rgb[i] = std::uint8_t(std::lround(std::clamp(double(d[i]), 0.0, 1.0) * 255.0));
    }
    return encode_png_raw(img.width(), img.height(), PNG_FORMAT_RGB, rgb.data());
}

Bytes encode_gray_png(int width, int height, std::span<const std::uint8_t> values) {
    if (values.size() != size_t(width) * size_t(height)) {
        throw Error(ErrorCode::DimensionMismatch, "gray buffer does not match image dimensions");
    }
    return encode_png_raw(width, height, PNG_FORMAT_GRAY, values.data());
}

GrayImage decode_gray_png(std::span<const std::uint8_t> bytes) {
    if (!is_png(bytes)) throw Error(ErrorCode::IoError, "expected a PNG file");
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::IoError, std::string("png decode failed: ") + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    GrayImage out;
    out.width = int(image.width);
    out.height = int(image.height);
    out.values.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.values.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error(ErrorCode::IoError, std::string("png decode failed: ") + image.message);
    }
    return out;
}

Bytes encode_mask_png(const BinaryMask& mask) {
    std::vector<std::uint8_t> gray(mask.pixel_count());
    const auto labels = mask.labels();
    for (size_t i = 0; i < gray.size(); ++i) gray[i] = labels[i] ? 255 : 0;
    return encode_gray_png(mask.width(), mask.height(), gray);
}

BinaryMask decode_mask(std::span<const std::uint8_t> bytes) {
    const GrayImage gray = decode_gray_png(bytes);
    BinaryMask mask(gray.width, gray.height);
    for (size_t i = 0; i < gray.values.size(); ++i) mask.set(i, gray.values[i] >= 128);
    return mask;
}

BinaryMask read_mask(const std::filesystem::path& path) { return decode_mask(read_file(path)); }

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace matteforge::io
