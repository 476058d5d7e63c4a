#include "matteforge/trimap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matteforge/error.hpp"
#include "matteforge/imaging.hpp"

namespace matteforge {

size_t Trimap::count(TrimapLabel l) const { return size_t(std::count(labels_.begin(), labels_.end(), l)); }

std::vector<std::uint8_t> Trimap::gray_values() const {
    std::vector<std::uint8_t> out(labels_.size());
    for (size_t i = 0; i < out.size(); ++i) {
        switch (labels_[i]) {
            case TrimapLabel::Foreground: out[i] = 255; break;
            case TrimapLabel::Background: out[i] = 0; break;
            case TrimapLabel::Unknown: out[i] = 128; break;
        }
    }
    return out;
}

int TrimapConfig::radius_for(int factor) const { return std::max(1, int(std::lround(band_scale * factor))); }

void TrimapConfig::validate() const {
    if (!(band_scale > 0)) throw Error(ErrorCode::InvalidArgument, "trimap band_scale must be positive");
}

BinaryMask upsample_to_original(const BinaryMask& mask, int orig_w, int orig_h, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "factor must be >= 1");
    const bool width_ok = mask.width() == (orig_w + k - 1) / k;
    const bool height_ok = mask.height() == (orig_h + k - 1) / k;
    if (!width_ok || !height_ok) {
        throw Error(ErrorCode::InvalidTarget, "mask " + std::to_string(mask.width()) + "x" +
                                                  std::to_string(mask.height()) + " does not cover " +
                                                  std::to_string(orig_w) + "x" + std::to_string(orig_h) +
                                                  " at factor " + std::to_string(k));
    }
    return crop_mask(upsample_mask(mask, mask.width() * k, mask.height() * k), orig_w, orig_h);
}

Trimap trimap_from_mask(const BinaryMask& full_res, int r) {
    const auto band = band_flags(full_res, r);
    Trimap t(full_res.width(), full_res.height());
    for (size_t i = 0; i < band.size(); ++i) {
        if (band[i]) continue;
        t.set(i, full_res.foreground(i) ? TrimapLabel::Foreground : TrimapLabel::Background);
    }
    return t;
}

Trimap build_trimap(const BinaryMask& mask, int orig_w, int orig_h, int k, const TrimapConfig& cfg) {
    cfg.validate();
    return trimap_from_mask(upsample_to_original(mask, orig_w, orig_h, k), cfg.radius_for(k));
}

}  // namespace matteforge
