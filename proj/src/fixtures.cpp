#include "matteforge/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

#include "matteforge/error.hpp"
#include "matteforge/image_io.hpp"

namespace matteforge::fixtures {

namespace {

// std distributions are implementation-defined; map the engine output
// directly so fixtures are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint32_t seed) : engine_(seed) {}
    double unit() { return double(engine_()) / 4294967296.0; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    int integer(int lo, int hi) { return lo + int(unit() * double(hi - lo + 1)); }

private:
    std::mt19937 engine_;
};

float clamp01(double v) { return float(std::clamp(v, 0.0, 1.0)); }

double disk_coverage(double px, double py, double cx, double cy, double radius) {
    constexpr int kSub = 4;
    int inside = 0;
    for (int sy = 0; sy < kSub; ++sy) {
        for (int sx = 0; sx < kSub; ++sx) {
            const double x = px + (sx + 0.5) / kSub;
            const double y = py + (sy + 0.5) / kSub;
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius) ++inside;
        }
    }
    return double(inside) / double(kSub * kSub);
}

}  // namespace

BoundingBox box_around(const BinaryMask& truth, double looseness, int padding) {
    int x0 = truth.width(), y0 = truth.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < truth.height(); ++y) {
        for (int x = 0; x < truth.width(); ++x) {
            if (!truth.foreground(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) throw Error(ErrorCode::InvalidBoundingBox, "ground truth has no foreground");
    const double cx = 0.5 * (x0 + x1 + 1);
    const double cy = 0.5 * (y0 + y1 + 1);
    const double half_w = 0.5 * (x1 - x0 + 1) * looseness + padding;
    const double half_h = 0.5 * (y1 - y0 + 1) * looseness + padding;
    const int bx0 = std::max(1, int(std::floor(cx - half_w)));
    const int by0 = std::max(1, int(std::floor(cy - half_h)));
    const int bx1 = std::min(truth.width() - 1, int(std::ceil(cx + half_w)));
    const int by1 = std::min(truth.height() - 1, int(std::ceil(cy + half_h)));
    return BoundingBox{bx0, by0, bx1 - bx0, by1 - by0};
}

LabeledImage disk_on_texture(std::uint32_t seed, int size) {
    Rng rng(seed * 2654435761u + 17u);
    const double s = double(size);
    const double radius = s * rng.uniform(0.15, 0.19);
    const double cx = s * 0.5 + rng.uniform(-0.06, 0.06) * s;
    const double cy = s * 0.5 + rng.uniform(-0.06, 0.06) * s;
    const std::array<double, 3> disk{rng.uniform(0.80, 0.90), rng.uniform(0.10, 0.18), rng.uniform(0.10, 0.18)};

    // Background: cells of a small cool palette, so every background color
    // also occurs well outside any box around the disk.
    static constexpr std::array<std::array<double, 3>, 4> kPalette{{
        {0.15, 0.25, 0.70},
        {0.20, 0.50, 0.30},
        {0.55, 0.58, 0.62},
        {0.10, 0.45, 0.55},
    }};
    const int sites = std::max(8, int(std::lround(s * s / 1000.0)));
    std::vector<std::array<double, 2>> site_xy(static_cast<size_t>(sites));
    std::vector<int> site_color(static_cast<size_t>(sites));
    for (int i = 0; i < sites; ++i) {
        site_xy[size_t(i)] = {rng.uniform(0.0, s), rng.uniform(0.0, s)};
        site_color[size_t(i)] = rng.integer(0, 3);
    }
    std::vector<std::array<double, 3>> background(size_t(size) * size_t(size));
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            int nearest = 0;
            double best = std::numeric_limits<double>::max();
            for (int i = 0; i < sites; ++i) {
                const double d = std::hypot(x + 0.5 - site_xy[size_t(i)][0], y + 0.5 - site_xy[size_t(i)][1]);
                if (d < best) {
                    best = d;
                    nearest = i;
                }
            }
            auto& px = background[size_t(y) * size_t(size) + size_t(x)];
            for (int c = 0; c < 3; ++c)
                px[size_t(c)] = kPalette[size_t(site_color[size_t(nearest)])][size_t(c)] + rng.uniform(-0.04, 0.04);
        }
    }
    // Clutter blobs of random color, large enough to survive as patches at
    // full resolution, kept clear of the disk so the truth stays analytic.
    const int blobs = int(std::lround(s * s / 400.0));
    for (int b = 0; b < blobs; ++b) {
        const double bx = rng.uniform(0.0, s);
        const double by = rng.uniform(0.0, s);
        const double br = rng.uniform(2.5, 4.5);
        const std::array<double, 3> color{rng.unit(), rng.unit(), rng.unit()};
        if (std::hypot(bx - cx, by - cy) < radius + br + 3.0) continue;
        for (int y = std::max(0, int(by - br) - 1); y <= std::min(size - 1, int(by + br) + 1); ++y) {
            for (int x = std::max(0, int(bx - br) - 1); x <= std::min(size - 1, int(bx + br) + 1); ++x) {
                if (std::hypot(x + 0.5 - bx, y + 0.5 - by) <= br) background[size_t(y) * size_t(size) + size_t(x)] = color;
            }
        }
    }

    LabeledImage out{Image(size, size), BinaryMask(size, size), {}};
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double a = disk_coverage(x, y, cx, cy, radius);
            const auto& bg = background[size_t(y) * size_t(size) + size_t(x)];
            for (int c = 0; c < 3; ++c) out.image.at(x, y, c) = clamp01(a * disk[size_t(c)] + (1.0 - a) * bg[size_t(c)]);
            out.truth.set(x, y, std::hypot(x + 0.5 - cx, y + 0.5 - cy) <= radius);
        }
    }
    out.box = box_around(out.truth, 1.0);
    return out;
}

LabeledImage cluttered_texture(std::uint32_t seed, int size) {
    Rng rng(seed * 747796405u + 2891336453u);
    LabeledImage out{Image(size, size), BinaryMask(size, size), {}};
    // Random blobs of 1-3 px, painted over a noisy gray base.
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < 3; ++c) out.image.at(x, y, c) = clamp01(0.5 + rng.uniform(-0.1, 0.1));
    const int blobs = size * size / 3;
    for (int b = 0; b < blobs; ++b) {
        const int bx = rng.integer(0, size - 1);
        const int by = rng.integer(0, size - 1);
        const int bs = rng.integer(1, 3);
        const std::array<double, 3> color{rng.unit(), rng.unit(), rng.unit()};
        for (int y = by; y < std::min(size, by + bs); ++y)
            for (int x = bx; x < std::min(size, bx + bs); ++x)
                for (int c = 0; c < 3; ++c) out.image.at(x, y, c) = float(color[size_t(c)]);
    }
    const double cx = size * rng.uniform(0.45, 0.55);
    const double cy = size * rng.uniform(0.45, 0.55);
    const double half = size * rng.uniform(0.15, 0.2);
    const std::array<double, 3> object{rng.uniform(0.85, 0.95), rng.uniform(0.8, 0.9), rng.uniform(0.1, 0.2)};
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const bool inside = std::abs(x + 0.5 - cx) <= half && std::abs(y + 0.5 - cy) <= half;
            if (!inside) continue;
            for (int c = 0; c < 3; ++c) out.image.at(x, y, c) = float(object[size_t(c)]);
            out.truth.set(x, y, true);
        }
    }
    out.box = box_around(out.truth, 1.2);
    return out;
}

Image tile_mosaic(int size) {
    static constexpr std::array<std::array<float, 3>, 16> kColors{{
        {0.9f, 0.1f, 0.1f}, {0.1f, 0.8f, 0.1f}, {0.1f, 0.1f, 0.9f}, {0.9f, 0.9f, 0.1f},
        {0.1f, 0.9f, 0.9f}, {0.9f, 0.1f, 0.9f}, {0.95f, 0.95f, 0.95f}, {0.05f, 0.05f, 0.05f},
        {0.5f, 0.25f, 0.0f}, {0.0f, 0.4f, 0.4f}, {0.6f, 0.6f, 0.2f}, {0.3f, 0.0f, 0.5f},
        {0.9f, 0.5f, 0.1f}, {0.4f, 0.7f, 0.9f}, {0.5f, 0.5f, 0.5f}, {0.2f, 0.5f, 0.1f},
    }};
    Image img(size, size);
    const int tile = (size + 3) / 4;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) img.set_pixel(x, y, kColors[size_t((y / tile) * 4 + (x / tile))]);
    return img;
}

Image block_grid(int cols, int rows, int block) {
    static constexpr std::array<std::array<float, 3>, 4> kColors{{
        {0.9f, 0.1f, 0.1f},
        {0.1f, 0.7f, 0.1f},
        {0.1f, 0.1f, 0.9f},
        {0.95f, 0.95f, 0.2f},
    }};
    Image img(cols * block, rows * block);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const int bx = x / block;
            const int by = y / block;
            img.set_pixel(x, y, kColors[size_t((by % 2) * 2 + (bx % 2))]);
        }
    }
    return img;
}

Composite ramp_composite(int size, int border) {
    const std::array<double, 3> fg{0.9, 0.1, 0.1};
    const std::array<double, 3> bg{0.1, 0.1, 0.9};
    Composite out{Image(size, size), std::vector<double>(size_t(size) * size_t(size))};
    const double span = double(size - 2 * border);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double a;
            if (x < border) {
                a = 1.0;
            } else if (x >= size - border) {
                a = 0.0;
            } else {
                const double t = (x - border + 0.5) / span;
                a = 1.0 - t * t * (3.0 - 2.0 * t);
            }
            out.alpha[size_t(y) * size_t(size) + size_t(x)] = a;
            for (int c = 0; c < 3; ++c) out.image.at(x, y, c) = float(a * fg[size_t(c)] + (1.0 - a) * bg[size_t(c)]);
        }
    }
    return out;
}

std::filesystem::path write_disk_corpus(const std::filesystem::path& dir, int count, std::uint32_t first_seed,
                                        int size) {
    std::filesystem::create_directories(dir);
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < count; ++i) {
        const std::uint32_t seed = first_seed + std::uint32_t(i);
        const LabeledImage sample = disk_on_texture(seed, size);
        char name[32];
        std::snprintf(name, sizeof(name), "disk-%03u", seed);
        io::write_file(dir / (std::string(name) + ".png"), io::encode_png(sample.image));
        io::write_file(dir / (std::string(name) + "_gt.png"), io::encode_mask_png(sample.truth));
        entries.push_back({{"id", name},
                           {"image", std::string(name) + ".png"},
                           {"ground_truth", std::string(name) + "_gt.png"}});
    }
    const auto manifest = dir / "manifest.json";
    std::ofstream out(manifest);
    out << nlohmann::json{{"entries", entries}}.dump(2) << "\n";
    return manifest;
}

}  // namespace matteforge::fixtures
