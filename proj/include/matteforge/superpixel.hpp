#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "matteforge/image.hpp"

namespace matteforge {

struct MeanShiftConfig {
    double spatial_bandwidth = 8.0;  // h_s, pixels
    double range_bandwidth = 8.0;    // h_r, Lab units
    int min_area = 20;
    int max_iters = 50;
    /// Stop when the joint shift, normalized by the bandwidths, drops below this.
    double convergence_eps = 0.05;

    /// Throws InvalidArgument unless every field is strictly positive.
    void validate() const;
};

struct PatchStats {
    int id = 0;
    size_t area = 0;
    std::array<double, 3> mean_lab{};
    std::array<double, 2> centroid{};  // (x, y)
    /// Fraction of the patch's pixels inside the user box; filled by
    /// annotate_box_overlap, zero otherwise.
    double bbox_overlap = 0.0;

    friend bool operator==(const PatchStats&, const PatchStats&) = default;
};

/// Super-pixel decomposition: a dense patch id per pixel plus per-patch
/// statistics. Ids run 0..count-1 in order of first appearance in scan order.
class PatchMap {
public:
    PatchMap() = default;

    /// Builds a map from arbitrary non-negative region labels: ids are made
    /// dense in scan order and statistics are computed from `lab`. Regions are
    /// taken as given; callers guarantee 8-connectivity where it matters.
    static PatchMap from_labels(int width, int height, const std::vector<int>& labels, const LabImage& lab);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int count() const noexcept { return int(patches_.size()); }

    int id_at(int x, int y) const { return ids_[size_t(y) * size_t(width_) + size_t(x)]; }
    int id_at(size_t linear) const { return ids_[linear]; }
    const std::vector<int>& ids() const noexcept { return ids_; }
    const std::vector<PatchStats>& patches() const noexcept { return patches_; }
    const PatchStats& patch(int id) const { return patches_[size_t(id)]; }

    /// Sorted neighbor lists under 8-connectivity.
    std::vector<std::vector<int>> adjacency() const;

    void annotate_box_overlap(const BoundingBox& box);

    friend bool operator==(const PatchMap&, const PatchMap&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<int> ids_;
    std::vector<PatchStats> patches_;
};

/// Per-patch fraction of pixels inside `box`, indexed by patch id.
std::vector<double> box_overlap(const PatchMap& pm, const BoundingBox& box);

/// Per-pixel joint spatial-range mean-shift modes (x, y, L, a, b) with a flat
/// kernel. Exposed for testing; segment() consumes it.
std::vector<std::array<double, 5>> mean_shift_modes(const LabImage& lab, const MeanShiftConfig& cfg);

/// Mean-shift over-segmentation. Modes of 8-neighboring pixels are merged
/// when within h_s/2 spatially and h_r/2 in range (union in scan order), then
/// regions below min_area are merged into the adjacent region with the
/// nearest mean color until none remain (or a single region is left).
/// Throws ImageTooSmall below 4x4.
PatchMap segment(const Image& img, const MeanShiftConfig& cfg);

/// Number of distinct patches with at least one pixel inside `box`.
int count_patches_in_roi(const PatchMap& pm, const BoundingBox& box);

}  // namespace matteforge
