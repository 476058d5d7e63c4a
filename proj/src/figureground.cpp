#include "matteforge/figureground.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "matteforge/error.hpp"

namespace matteforge {

namespace {

double lab_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

// Returns 1 for members of the high cluster. Degenerate spread puts every
// value in the high cluster.
std::vector<std::uint8_t> two_means_high(const std::vector<double>& values) {
    std::vector<std::uint8_t> high(values.size(), 1);
    if (values.empty()) return high;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (!(hi > lo)) return high;

    // Lloyd iterations; the min and max values always stay in their own
    // clusters, so neither cluster empties.
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        double sum_lo = 0.0, sum_hi = 0.0;
        size_t n_lo = 0, n_hi = 0;
        for (size_t i = 0; i < values.size(); ++i) {
            const std::uint8_t h = std::abs(values[i] - hi) < std::abs(values[i] - lo) ? 1 : 0;
            changed |= iter == 0 || h != high[i];
            high[i] = h;
            (h ? sum_hi : sum_lo) += values[i];
            ++(h ? n_hi : n_lo);
        }
        if (!changed) break;
        lo = sum_lo / double(n_lo);
        hi = sum_hi / double(n_hi);
    }
    return high;
}

// Foreground components over patch adjacency, as lists of patch ids in order
// of their smallest member.
std::vector<std::vector<int>> foreground_components(const std::vector<std::uint8_t>& fg,
                                                    const std::vector<std::vector<int>>& adj) {
    std::vector<std::vector<int>> components;
    std::vector<std::uint8_t> visited(fg.size(), 0);
    for (size_t start = 0; start < fg.size(); ++start) {
        if (!fg[start] || visited[start]) continue;
        std::vector<int> comp;
        std::vector<int> stack{int(start)};
        visited[start] = 1;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            comp.push_back(p);
            for (int n : adj[size_t(p)]) {
                if (fg[size_t(n)] && !visited[size_t(n)]) {
                    visited[size_t(n)] = 1;
                    stack.push_back(n);
                }
            }
        }
        components.push_back(std::move(comp));
    }
    return components;
}

}  // namespace

void FgConfig::validate() const {
    if (!(seed_outside_fraction > 0.0 && seed_outside_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "seed_outside_fraction must lie in (0,1]");
    }
    if (min_patches < 1) throw Error(ErrorCode::InvalidArgument, "min_patches must be >= 1");
    if (!(fragment_area_fraction > 0.0 && fragment_area_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fragment_area_fraction must lie in (0,1)");
    }
}

size_t FgLabeling::foreground_patches() const {
    return size_t(std::count(patch_foreground.begin(), patch_foreground.end(), std::uint8_t{1}));
}

BinaryMask mask_from_patch_labels(const PatchMap& pm, const std::vector<std::uint8_t>& patch_foreground) {
    BinaryMask mask(pm.width(), pm.height());
    for (size_t i = 0; i < mask.pixel_count(); ++i) mask.set(i, patch_foreground[size_t(pm.id_at(i))] != 0);
    return mask;
}

FgLabeling classify(const PatchMap& pm, const BoundingBox& box, const FgConfig& cfg) {
    cfg.validate();
    box.validate(pm.width(), pm.height());
    if (pm.count() < cfg.min_patches) {
        throw Error(ErrorCode::TooFewPatches, std::to_string(pm.count()) + " patches, need " +
                                                  std::to_string(cfg.min_patches));
    }
    const auto overlap = box_overlap(pm, box);
    std::vector<std::uint8_t> seeds(overlap.size());
    bool any_seed = false;
    for (size_t i = 0; i < overlap.size(); ++i) {
        seeds[i] = overlap[i] < cfg.seed_outside_fraction ? 1 : 0;
        any_seed |= seeds[i] != 0;
    }
    if (!any_seed) throw Error(ErrorCode::InvalidBoundingBox, "no patch lies mostly outside the box");
    return classify_with_seeds(pm, seeds, cfg);
}

FgLabeling classify_with_seeds(const PatchMap& pm, const std::vector<std::uint8_t>& seeds, const FgConfig& cfg) {
    cfg.validate();
    if (seeds.size() != size_t(pm.count())) {
        throw Error(ErrorCode::DimensionMismatch, "seed vector length differs from patch count");
    }
    const auto& patches = pm.patches();

    std::vector<int> candidates;
    std::vector<double> d_bg;
    for (size_t i = 0; i < patches.size(); ++i) {
        if (seeds[i]) continue;
        double best = std::numeric_limits<double>::infinity();
        for (size_t s = 0; s < patches.size(); ++s) {
            if (seeds[s]) best = std::min(best, lab_distance(patches[i].mean_lab, patches[s].mean_lab));
        }
        candidates.push_back(int(i));
        d_bg.push_back(best);
    }

    std::vector<std::uint8_t> fg(patches.size(), 0);
    const auto high = two_means_high(d_bg);
    for (size_t i = 0; i < candidates.size(); ++i) fg[size_t(candidates[i])] = high[i];

    const auto adj = pm.adjacency();
    std::vector<std::uint8_t> on_border(patches.size(), 0);
    for (int x = 0; x < pm.width(); ++x) {
        on_border[size_t(pm.id_at(x, 0))] = 1;
        on_border[size_t(pm.id_at(x, pm.height() - 1))] = 1;
    }
    for (int y = 0; y < pm.height(); ++y) {
        on_border[size_t(pm.id_at(0, y))] = 1;
        on_border[size_t(pm.id_at(pm.width() - 1, y))] = 1;
    }

    for (const auto& comp : foreground_components(fg, adj)) {
        const bool touches = std::any_of(comp.begin(), comp.end(), [&](int p) { return on_border[size_t(p)] != 0; });
        if (touches)
            for (int p : comp) fg[size_t(p)] = 0;
    }

    const auto components = foreground_components(fg, adj);
    std::vector<size_t> areas;
    size_t largest = 0;
    for (const auto& comp : components) {
        size_t a = 0;
        for (int p : comp) a += patches[size_t(p)].area;
        areas.push_back(a);
        largest = std::max(largest, a);
    }
    const double cutoff = cfg.fragment_area_fraction * double(largest);
    for (size_t c = 0; c < components.size(); ++c) {
        if (double(areas[c]) < cutoff)
            for (int p : components[c]) fg[size_t(p)] = 0;
    }

    FgLabeling out;
    out.mask = mask_from_patch_labels(pm, fg);
    out.patch_foreground = std::move(fg);
    return out;
}

double mcut_score(const FgLabeling& labeling, const PatchMap& pm) {
    if (labeling.patch_foreground.size() != size_t(pm.count())) {
        throw Error(ErrorCode::DimensionMismatch, "labeling does not match patch map");
    }
    std::vector<const PatchStats*> fg, bg;
    for (const auto& p : pm.patches()) (labeling.patch_foreground[size_t(p.id)] ? fg : bg).push_back(&p);
    if (fg.empty() || bg.empty()) {
        throw Error(ErrorCode::DegenerateSegmentation, "m-cut needs both foreground and background patches");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto* f : fg)
        for (const auto* b : bg) best = std::min(best, lab_distance(f->mean_lab, b->mean_lab));
    return best;
}

}  // namespace matteforge
