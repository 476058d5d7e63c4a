#pragma once

#include <cstdint>
#include <vector>

#include "matteforge/image.hpp"
#include "matteforge/superpixel.hpp"

namespace matteforge {

struct FgConfig {
    /// Patches with less than this fraction of their pixels inside the box seed the background.
    double seed_outside_fraction = 0.5;
    /// Fewer patches than this means the resolution is unusable.
    int min_patches = 8;
    /// Foreground components smaller than this fraction of the largest one are dropped.
    double fragment_area_fraction = 0.05;

    void validate() const;
};

/// Patch-level figure/ground assignment and the pixel mask it induces.
struct FgLabeling {
    std::vector<std::uint8_t> patch_foreground;  // indexed by patch id, 1 = foreground
    BinaryMask mask;

    size_t foreground_patches() const;
    size_t background_patches() const { return patch_foreground.size() - foreground_patches(); }
};

/// Bounding-box driven classification:
///   1. patches with box overlap < rho seed the background;
///   2. every other patch gets d_bg, the nearest mean-Lab distance to a seed;
///   3. 2-means on d_bg (centers start at min and max); the high group is
///      foreground. Zero spread makes every candidate foreground;
///   4. foreground components (patch adjacency) touching the image border
///      become background;
///   5. foreground components under fragment_area_fraction of the largest
///      component become background.
/// Throws TooFewPatches when pm has fewer than min_patches patches and
/// InvalidBoundingBox when the box is invalid or seeds nothing.
FgLabeling classify(const PatchMap& pm, const BoundingBox& box, const FgConfig& cfg);

/// Steps 2-5 with caller-provided background seeds (1 = seed).
FgLabeling classify_with_seeds(const PatchMap& pm, const std::vector<std::uint8_t>& seeds, const FgConfig& cfg);

/// Min over (foreground, background) patch pairs of the Euclidean distance
/// between their mean Lab colors. Throws DegenerateSegmentation if either
/// side is empty.
double mcut_score(const FgLabeling& labeling, const PatchMap& pm);

BinaryMask mask_from_patch_labels(const PatchMap& pm, const std::vector<std::uint8_t>& patch_foreground);

}  // namespace matteforge
