#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "matteforge/image.hpp"

namespace matteforge {

enum class TrimapLabel : std::uint8_t { Background = 0, Foreground = 1, Unknown = 2 };

class Trimap {
public:
    Trimap() = default;
    Trimap(int width, int height, TrimapLabel fill = TrimapLabel::Unknown)
        : width_(width), height_(height), labels_(size_t(width) * size_t(height), fill) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    size_t pixel_count() const noexcept { return labels_.size(); }

    TrimapLabel at(int x, int y) const { return labels_[size_t(y) * size_t(width_) + size_t(x)]; }
    TrimapLabel at(size_t linear) const { return labels_[linear]; }
    void set(int x, int y, TrimapLabel l) { labels_[size_t(y) * size_t(width_) + size_t(x)] = l; }
    void set(size_t linear, TrimapLabel l) { labels_[linear] = l; }

    size_t count(TrimapLabel l) const;
    std::span<const TrimapLabel> labels() const noexcept { return labels_; }

    /// PNG gray levels: foreground 255, background 0, unknown 128.
    std::vector<std::uint8_t> gray_values() const;

    friend bool operator==(const Trimap&, const Trimap&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<TrimapLabel> labels_;
};

struct TrimapConfig {
    /// Unknown band radius is band_scale * factor (at least 1 pixel).
    double band_scale = 1.0;

    int radius_for(int factor) const;
    void validate() const;
};

/// Expands a mask computed at 1/k resolution back to orig_w x orig_h by block
/// replication. Throws InvalidTarget unless mask dims equal ceil(orig/k).
BinaryMask upsample_to_original(const BinaryMask& mask, int orig_w, int orig_h, int k);

/// Unknown = pixels within Chebyshev distance r of the opposite label; every
/// other pixel keeps its mask label.
Trimap trimap_from_mask(const BinaryMask& full_res, int r);

/// upsample_to_original followed by trimap_from_mask with r = cfg.radius_for(k).
Trimap build_trimap(const BinaryMask& mask, int orig_w, int orig_h, int k, const TrimapConfig& cfg = {});

}  // namespace matteforge
