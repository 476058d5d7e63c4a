#pragma once

#include <cstdint>
#include <vector>

#include "matteforge/image.hpp"

namespace matteforge {

/// Reduces `img` by an integer factor. For k > 1 the image is blurred with a
/// Gaussian of sigma k/2, then bilinearly sampled at the center of each k x k
/// block; the result is ceil(w/k) x ceil(h/k). k == 1 returns a copy.
/// Throws ImageTooSmall if the result would be smaller than 2x2.
Image downsample(const Image& img, int k);

/// Separable Gaussian blur with replicated borders.
Image gaussian_blur(const Image& img, double sigma);

/// Nearest-neighbor mask expansion; each output pixel takes the label of the
/// source pixel whose center is nearest. Throws InvalidTarget when the target
/// is smaller than the source in either dimension.
BinaryMask upsample_mask(const BinaryMask& mask, int target_w, int target_h);

/// Top-left crop of a mask.
BinaryMask crop_mask(const BinaryMask& mask, int w, int h);

/// sRGB (D65) to CIE-Lab.
LabImage rgb_to_lab(const Image& img);
std::array<double, 3> srgb_to_lab(double r, double g, double b);
std::array<double, 3> lab_to_srgb(double l, double a, double b);
Image lab_to_rgb(const LabImage& lab);

/// Per-pixel Chebyshev distance to the nearest pixel of the opposite label.
/// Pixels in a single-label mask get a distance larger than any image extent.
std::vector<int> opposite_label_distance(const BinaryMask& mask);

/// Pixels (in scan order) whose Chebyshev distance to the nearest pixel of
/// the opposite label is at most r. Requires r >= 1.
std::vector<PixelCoord> band_around_boundary(const BinaryMask& mask, int r);

/// Same set as band_around_boundary, as a per-pixel 0/1 flag.
std::vector<std::uint8_t> band_flags(const BinaryMask& mask, int r);

}  // namespace matteforge
