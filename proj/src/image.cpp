#include "matteforge/image.hpp"

#include <algorithm>
#include <string>

#include "matteforge/error.hpp"

namespace matteforge {

bool channels_in_unit_range(const Image& img) {
    const auto d = img.data();
    return std::all_of(d.begin(), d.end(), [](float v) { return v >= 0.0f && v <= 1.0f; });
}

size_t BinaryMask::foreground_count() const {
    return size_t(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

bool BoundingBox::valid_for(int width, int height) const noexcept {
    return w >= 1 && h >= 1 && x >= 1 && y >= 1 && x + w <= width - 1 && y + h <= height - 1;
}

void BoundingBox::validate(int width, int height) const {
    if (!valid_for(width, height)) {
        throw Error(ErrorCode::InvalidBoundingBox,
                    "box (" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(w) + "," +
                        std::to_string(h) + ") must lie inside a " + std::to_string(width) + "x" +
                        std::to_string(height) + " image with a 1-pixel margin");
    }
}

}  // namespace matteforge
