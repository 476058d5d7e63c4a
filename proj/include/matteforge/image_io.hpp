#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "matteforge/image.hpp"

namespace matteforge::io {

using Bytes = std::vector<std::uint8_t>;

/// Decodes PNG or JPEG bytes (sniffed by signature) into an sRGB image with
/// channels scaled by 1/255. Alpha is dropped, gray is replicated.
Image decode_image(std::span<const std::uint8_t> bytes);
Image read_image(const std::filesystem::path& path);

/// 8-bit RGB PNG, round(v * 255).
Bytes encode_png(const Image& img);
/// 8-bit grayscale PNG from raw values (row-major, width*height bytes).
Bytes encode_gray_png(int width, int height, std::span<const std::uint8_t> values);

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;
};
GrayImage decode_gray_png(std::span<const std::uint8_t> bytes);

/// Mask PNG: foreground = 255, background = 0. Reading thresholds at 128.
Bytes encode_mask_png(const BinaryMask& mask);
BinaryMask decode_mask(std::span<const std::uint8_t> bytes);
BinaryMask read_mask(const std::filesystem::path& path);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace matteforge::io
