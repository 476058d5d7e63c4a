#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "matteforge/image.hpp"

namespace matteforge::fixtures {

/// A synthetic image with its analytic ground truth.
struct LabeledImage {
    Image image;
    BinaryMask truth;
    BoundingBox box;  // tight box around the truth, padded by 2 px
};

/// Anti-aliased red disk over Voronoi cells drawn from a small cool palette
/// (with per-pixel noise), scattered with mid-size blobs of random color.
/// Ground truth is the analytic disk membership of each pixel center.
LabeledImage disk_on_texture(std::uint32_t seed, int size = 200);

/// High-frequency multi-color texture (1-3 px blobs) with a central object;
/// used for patch-count trends across resolutions.
LabeledImage cluttered_texture(std::uint32_t seed, int size = 240);

/// 4x4 mosaic of strongly different colored tiles. Coarse resolutions blur
/// it to a handful of patches.
Image tile_mosaic(int size = 100);

/// cols x rows blocks of block x block pixels, colored so that no two blocks
/// of the same color touch (even diagonally).
Image block_grid(int cols, int rows, int block);

/// Two-color composite I = a F + (1 - a) B with a horizontal alpha ramp:
/// columns [0, border) have a = 1, the last `border` columns a = 0, and the
/// middle follows a smoothstep.
struct Composite {
    Image image;
    std::vector<double> alpha;
};
Composite ramp_composite(int size = 60, int border = 10);

/// Tight bounding box of the foreground, scaled about its center by
/// `looseness`, padded by `padding` px and clamped to keep a 1 px margin.
BoundingBox box_around(const BinaryMask& truth, double looseness, int padding = 2);

/// Writes disk_on_texture(first_seed..first_seed+count-1) as PNGs plus a
/// manifest.json into `dir`. Returns the manifest path.
std::filesystem::path write_disk_corpus(const std::filesystem::path& dir, int count, std::uint32_t first_seed = 1,
                                        int size = 200);

}  // namespace matteforge::fixtures
