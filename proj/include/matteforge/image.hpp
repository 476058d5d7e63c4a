#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace matteforge {

struct RgbSpace {};
struct LabSpace {};

/// Dense interleaved 3-channel raster. The tag keeps sRGB and Lab rasters
/// from being mixed up at call sites.
template <typename Space>
class Raster3 {
public:
    using Pixel = std::array<float, 3>;

    Raster3() = default;
    Raster3(int width, int height) : width_(width), height_(height), data_(size_t(width) * size_t(height) * 3, 0.0f) {}
    Raster3(int width, int height, std::vector<float> data) : width_(width), height_(height), data_(std::move(data)) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    size_t pixel_count() const noexcept { return size_t(width_) * size_t(height_); }
    bool empty() const noexcept { return data_.empty(); }

    float& at(int x, int y, int c) { return data_[index(x, y) * 3 + size_t(c)]; }
    float at(int x, int y, int c) const { return data_[index(x, y) * 3 + size_t(c)]; }

    Pixel pixel(int x, int y) const {
        const size_t i = index(x, y) * 3;
        return {data_[i], data_[i + 1], data_[i + 2]};
    }
    Pixel pixel(size_t linear) const {
        return {data_[linear * 3], data_[linear * 3 + 1], data_[linear * 3 + 2]};
    }
    void set_pixel(int x, int y, const Pixel& p) {
        const size_t i = index(x, y) * 3;
        data_[i] = p[0];
        data_[i + 1] = p[1];
        data_[i + 2] = p[2];
    }

    std::span<const float> data() const noexcept { return data_; }
    std::span<float> data() noexcept { return data_; }

    size_t index(int x, int y) const noexcept { return size_t(y) * size_t(width_) + size_t(x); }

    friend bool operator==(const Raster3&, const Raster3&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// sRGB image, channels in [0,1].
using Image = Raster3<RgbSpace>;
/// CIE-Lab raster (L in [0,100]).
using LabImage = Raster3<LabSpace>;

/// True when every channel value of `img` lies in [0,1].
bool channels_in_unit_range(const Image& img);

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool foreground = false)
        : width_(width), height_(height), labels_(size_t(width) * size_t(height), foreground ? 1 : 0) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    size_t pixel_count() const noexcept { return labels_.size(); }

    bool foreground(int x, int y) const { return labels_[index(x, y)] != 0; }
    bool foreground(size_t linear) const { return labels_[linear] != 0; }
    void set(int x, int y, bool fg) { labels_[index(x, y)] = fg ? 1 : 0; }
    void set(size_t linear, bool fg) { labels_[linear] = fg ? 1 : 0; }

    size_t foreground_count() const;
    size_t index(int x, int y) const noexcept { return size_t(y) * size_t(width_) + size_t(x); }

    /// Label per pixel, 1 = foreground, 0 = background.
    std::span<const std::uint8_t> labels() const noexcept { return labels_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> labels_;
};

/// User rectangle assumed to contain the object. Must sit inside the image
/// with at least one pixel of margin on every side.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool contains(int px, int py) const noexcept { return px >= x && px < x + w && py >= y && py < y + h; }
    bool valid_for(int width, int height) const noexcept;
    /// Throws Error(InvalidBoundingBox) unless valid_for(width, height).
    void validate(int width, int height) const;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct PixelCoord {
    int x = 0;
    int y = 0;
    friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

}  // namespace matteforge
