#include "matteforge/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "matteforge/error.hpp"
#include "matteforge/imaging.hpp"
#include "matteforge/parallel.hpp"

namespace matteforge {

namespace {

class DisjointSet {
public:
    explicit DisjointSet(size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int i) {
        while (parent_[size_t(i)] != i) {
            parent_[size_t(i)] = parent_[size_t(parent_[size_t(i)])];
            i = parent_[size_t(i)];
        }
        return i;
    }

    // The smaller root survives, so the result does not depend on call order
    // within a scan.
    int unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (b < a) std::swap(a, b);
        parent_[size_t(b)] = a;
        return a;
    }

private:
    std::vector<int> parent_;
};

double lab_distance_sq(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double d0 = a[0] - b[0];
    const double d1 = a[1] - b[1];
    const double d2 = a[2] - b[2];
    return d0 * d0 + d1 * d1 + d2 * d2;
}

struct Region {
    size_t area = 0;
    std::array<double, 3> sum_lab{};
    std::vector<int> neighbors;

    std::array<double, 3> mean() const {
        const double n = double(area);
        return {sum_lab[0] / n, sum_lab[1] / n, sum_lab[2] / n};
    }
};

// Merges every region smaller than min_area into its adjacent region with the
// nearest mean color, smallest regions first (ties by lower index).
std::vector<int> merge_small_regions(const std::vector<int>& labels, int region_count, int width, int height,
                                     const LabImage& lab, int min_area) {
    std::vector<Region> regions(static_cast<size_t>(region_count));
    for (size_t i = 0; i < labels.size(); ++i) {
        Region& r = regions[size_t(labels[i])];
        ++r.area;
        const auto p = lab.pixel(i);
        for (int c = 0; c < 3; ++c) r.sum_lab[size_t(c)] += p[size_t(c)];
    }
    auto link = [&](int a, int b) {
        if (a == b) return;
        regions[size_t(a)].neighbors.push_back(b);
        regions[size_t(b)].neighbors.push_back(a);
    };
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int here = labels[size_t(y) * size_t(width) + size_t(x)];
            if (x + 1 < width) link(here, labels[size_t(y) * size_t(width) + size_t(x + 1)]);
            if (y + 1 < height) {
                const size_t row = size_t(y + 1) * size_t(width);
                link(here, labels[row + size_t(x)]);
                if (x > 0) link(here, labels[row + size_t(x - 1)]);
                if (x + 1 < width) link(here, labels[row + size_t(x + 1)]);
            }
        }
    }
    for (auto& r : regions) {
        std::sort(r.neighbors.begin(), r.neighbors.end());
        r.neighbors.erase(std::unique(r.neighbors.begin(), r.neighbors.end()), r.neighbors.end());
    }

    DisjointSet sets(static_cast<size_t>(region_count));
    using Entry = std::pair<size_t, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (int i = 0; i < region_count; ++i) {
        if (regions[size_t(i)].area < size_t(min_area)) queue.emplace(regions[size_t(i)].area, i);
    }
    int live = region_count;
    while (!queue.empty() && live > 1) {
        const auto [area, id] = queue.top();
        queue.pop();
        if (sets.find(id) != id || regions[size_t(id)].area != area) continue;
        if (area >= size_t(min_area)) break;

        Region& small = regions[size_t(id)];
        const auto mean = small.mean();
        int best = -1;
        double best_d = 0.0;
        for (int n : small.neighbors) {
            const int root = sets.find(n);
            if (root == id) continue;
            const double d = lab_distance_sq(mean, regions[size_t(root)].mean());
            if (best < 0 || d < best_d || (d == best_d && root < best)) {
                best = root;
                best_d = d;
            }
        }
        if (best < 0) continue;

        const int keep = sets.unite(id, best);
        const int gone = keep == id ? best : id;
        Region& k = regions[size_t(keep)];
        Region& g = regions[size_t(gone)];
        k.area += g.area;
        for (int c = 0; c < 3; ++c) k.sum_lab[size_t(c)] += g.sum_lab[size_t(c)];
        std::vector<int> merged;
        merged.reserve(k.neighbors.size() + g.neighbors.size());
        for (int n : k.neighbors) merged.push_back(sets.find(n));
        for (int n : g.neighbors) merged.push_back(sets.find(n));
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        merged.erase(std::remove(merged.begin(), merged.end(), keep), merged.end());
        k.neighbors = std::move(merged);
        g.neighbors.clear();
        g.neighbors.shrink_to_fit();
        --live;
        if (k.area < size_t(min_area)) queue.emplace(k.area, keep);
    }

    std::vector<int> out(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) out[i] = sets.find(labels[i]);
    return out;
}

}  // namespace

void MeanShiftConfig::validate() const {
    if (!(spatial_bandwidth > 0) || !(range_bandwidth > 0) || min_area <= 0 || max_iters <= 0 ||
        !(convergence_eps > 0)) {
        throw Error(ErrorCode::InvalidArgument, "mean-shift configuration values must be strictly positive");
    }
}

PatchMap PatchMap::from_labels(int width, int height, const std::vector<int>& labels, const LabImage& lab) {
    if (labels.size() != size_t(width) * size_t(height) || lab.width() != width || lab.height() != height) {
        throw Error(ErrorCode::DimensionMismatch, "label raster does not match image dimensions");
    }
    PatchMap pm;
    pm.width_ = width;
    pm.height_ = height;
    pm.ids_.resize(labels.size());
    std::vector<int> remap;
    for (size_t i = 0; i < labels.size(); ++i) {
        const int label = labels[i];
        if (label < 0) throw Error(ErrorCode::InvalidArgument, "region labels must be non-negative");
        if (size_t(label) >= remap.size()) remap.resize(size_t(label) + 1, -1);
        if (remap[size_t(label)] < 0) {
            remap[size_t(label)] = int(pm.patches_.size());
            pm.patches_.emplace_back();
        }
        pm.ids_[i] = remap[size_t(label)];
    }
    std::vector<std::array<double, 3>> sum_lab(pm.patches_.size());
    std::vector<std::array<double, 2>> sum_xy(pm.patches_.size());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const size_t i = size_t(y) * size_t(width) + size_t(x);
            const size_t id = size_t(pm.ids_[i]);
            const auto p = lab.pixel(i);
            ++pm.patches_[id].area;
            for (int c = 0; c < 3; ++c) sum_lab[id][size_t(c)] += p[size_t(c)];
            sum_xy[id][0] += x;
            sum_xy[id][1] += y;
        }
    }
    for (size_t id = 0; id < pm.patches_.size(); ++id) {
        PatchStats& s = pm.patches_[id];
        s.id = int(id);
        const double n = double(s.area);
        for (int c = 0; c < 3; ++c) s.mean_lab[size_t(c)] = sum_lab[id][size_t(c)] / n;
        s.centroid = {sum_xy[id][0] / n, sum_xy[id][1] / n};
    }
    return pm;
}

std::vector<std::vector<int>> PatchMap::adjacency() const {
    std::vector<std::vector<int>> adj(patches_.size());
    auto link = [&](int a, int b) {
        if (a == b) return;
        adj[size_t(a)].push_back(b);
        adj[size_t(b)].push_back(a);
    };
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const int here = id_at(x, y);
            if (x + 1 < width_) link(here, id_at(x + 1, y));
            if (y + 1 < height_) {
                link(here, id_at(x, y + 1));
                if (x > 0) link(here, id_at(x - 1, y + 1));
                if (x + 1 < width_) link(here, id_at(x + 1, y + 1));
            }
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

void PatchMap::annotate_box_overlap(const BoundingBox& box) {
    const auto overlap = box_overlap(*this, box);
    for (size_t i = 0; i < patches_.size(); ++i) patches_[i].bbox_overlap = overlap[i];
}

std::vector<double> box_overlap(const PatchMap& pm, const BoundingBox& box) {
    std::vector<size_t> inside(size_t(pm.count()), 0);
    for (int y = box.y; y < box.y + box.h; ++y)
        for (int x = box.x; x < box.x + box.w; ++x)
            if (x >= 0 && y >= 0 && x < pm.width() && y < pm.height()) ++inside[size_t(pm.id_at(x, y))];
    std::vector<double> out(inside.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = double(inside[i]) / double(pm.patch(int(i)).area);
    return out;
}

std::vector<std::array<double, 5>> mean_shift_modes(const LabImage& lab, const MeanShiftConfig& cfg) {
    const int w = lab.width();
    const int h = lab.height();
    const double hs = cfg.spatial_bandwidth;
    const double hr = cfg.range_bandwidth;
    const double hs2 = hs * hs;
    const double hr2 = hr * hr;
    const int radius = int(std::floor(hs));
    const double eps2 = cfg.convergence_eps * cfg.convergence_eps;
    const auto colors = lab.data();

    std::vector<std::array<double, 5>> modes(lab.pixel_count());
    parallel_for(modes.size(), worker_count(), [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            std::array<double, 5> p{double(i % size_t(w)), double(i / size_t(w)), colors[i * 3], colors[i * 3 + 1],
                                    colors[i * 3 + 2]};
            for (int iter = 0; iter < cfg.max_iters; ++iter) {
                const int cx = int(std::lround(p[0]));
                const int cy = int(std::lround(p[1]));
                std::array<double, 5> sum{};
                size_t n = 0;
                for (int y = std::max(0, cy - radius); y <= std::min(h - 1, cy + radius); ++y) {
                    const double dy = y - p[1];
                    for (int x = std::max(0, cx - radius); x <= std::min(w - 1, cx + radius); ++x) {
                        const double dx = x - p[0];
                        if (dx * dx + dy * dy > hs2) continue;
                        const size_t j = (size_t(y) * size_t(w) + size_t(x)) * 3;
                        const double dl = colors[j] - p[2];
                        const double da = colors[j + 1] - p[3];
                        const double db = colors[j + 2] - p[4];
                        if (dl * dl + da * da + db * db > hr2) continue;
                        sum[0] += x;
                        sum[1] += y;
                        sum[2] += colors[j];
                        sum[3] += colors[j + 1];
                        sum[4] += colors[j + 2];
                        ++n;
                    }
                }
                if (n == 0) break;
                std::array<double, 5> next;
                for (int k = 0; k < 5; ++k) next[size_t(k)] = sum[size_t(k)] / double(n);
                const double sx = next[0] - p[0];
                const double sy = next[1] - p[1];
                double sr = 0.0;
                for (int k = 2; k < 5; ++k) sr += (next[size_t(k)] - p[size_t(k)]) * (next[size_t(k)] - p[size_t(k)]);
                p = next;
                if ((sx * sx + sy * sy) / hs2 + sr / hr2 < eps2) break;
            }
            modes[i] = p;
        }
    });
    return modes;
}

PatchMap segment(const Image& img, const MeanShiftConfig& cfg) {
    cfg.validate();
    if (img.width() < 4 || img.height() < 4) {
        throw Error(ErrorCode::ImageTooSmall, "mean-shift needs at least 4x4 pixels, got " +
                                                  std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
    const int w = img.width();
    const int h = img.height();
    const LabImage lab = rgb_to_lab(img);
    const auto modes = mean_shift_modes(lab, cfg);

    const double spatial_limit2 = 0.25 * cfg.spatial_bandwidth * cfg.spatial_bandwidth;
    const double range_limit2 = 0.25 * cfg.range_bandwidth * cfg.range_bandwidth;
    auto close = [&](size_t a, size_t b) {
        const auto& ma = modes[a];
        const auto& mb = modes[b];
        const double ds = (ma[0] - mb[0]) * (ma[0] - mb[0]) + (ma[1] - mb[1]) * (ma[1] - mb[1]);
        double dr = 0.0;
        for (int k = 2; k < 5; ++k) dr += (ma[size_t(k)] - mb[size_t(k)]) * (ma[size_t(k)] - mb[size_t(k)]);
        return ds <= spatial_limit2 && dr <= range_limit2;
    };

    DisjointSet sets(lab.pixel_count());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = size_t(y) * size_t(w) + size_t(x);
            if (x > 0 && close(i, i - 1)) sets.unite(int(i), int(i - 1));
            if (y > 0) {
                const size_t up = i - size_t(w);
                if (close(i, up)) sets.unite(int(i), int(up));
                if (x > 0 && close(i, up - 1)) sets.unite(int(i), int(up - 1));
                if (x + 1 < w && close(i, up + 1)) sets.unite(int(i), int(up + 1));
            }
        }
    }

    std::vector<int> labels(lab.pixel_count());
    std::vector<int> compact(lab.pixel_count(), -1);
    int regions = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        const int root = sets.find(int(i));
        if (compact[size_t(root)] < 0) compact[size_t(root)] = regions++;
        labels[i] = compact[size_t(root)];
    }
    labels = merge_small_regions(labels, regions, w, h, lab, cfg.min_area);
    return PatchMap::from_labels(w, h, labels, lab);
}

int count_patches_in_roi(const PatchMap& pm, const BoundingBox& box) {
    std::vector<std::uint8_t> seen(size_t(pm.count()), 0);
    int count = 0;
    for (int y = std::max(0, box.y); y < std::min(pm.height(), box.y + box.h); ++y) {
        for (int x = std::max(0, box.x); x < std::min(pm.width(), box.x + box.w); ++x) {
            auto& s = seen[size_t(pm.id_at(x, y))];
            if (!s) {
                s = 1;
                ++count;
            }
        }
    }
    return count;
}

}  // namespace matteforge
