#include "matteforge/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "matteforge/error.hpp"

namespace matteforge {

namespace {

// D65 reference white, Y normalized to 1.
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;
constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) { return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0; }

double lab_f_inv(double f) {
    const double f3 = f * f * f;
    return f3 > kEpsilon ? f3 : (116.0 * f - 16.0) / kKappa;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(size_t(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * double(i * i) / (sigma * sigma));
        kernel[size_t(i + radius)] = v;
        sum += v;
    }
    for (double& v : kernel) v /= sum;
    return kernel;
}

// Two-pass chessboard distance to the nearest pixel with flags[i] == target.
std::vector<int> chessboard_distance(const BinaryMask& mask, bool target) {
    const int w = mask.width();
    const int h = mask.height();
    const int far = w + h + 1;
    std::vector<int> dist(mask.pixel_count());
    for (size_t i = 0; i < dist.size(); ++i) dist[i] = mask.foreground(i) == target ? 0 : far;
    auto at = [&](int x, int y) -> int& { return dist[size_t(y) * size_t(w) + size_t(x)]; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int d = at(x, y);
            if (x > 0) d = std::min(d, at(x - 1, y) + 1);
            if (y > 0) {
                d = std::min(d, at(x, y - 1) + 1);
                if (x > 0) d = std::min(d, at(x - 1, y - 1) + 1);
                if (x + 1 < w) d = std::min(d, at(x + 1, y - 1) + 1);
            }
            at(x, y) = d;
        }
    }
    for (int y = h - 1; y >= 0; --y) {
        for (int x = w - 1; x >= 0; --x) {
            int d = at(x, y);
            if (x + 1 < w) d = std::min(d, at(x + 1, y) + 1);
            if (y + 1 < h) {
                d = std::min(d, at(x, y + 1) + 1);
                if (x + 1 < w) d = std::min(d, at(x + 1, y + 1) + 1);
                if (x > 0) d = std::min(d, at(x - 1, y + 1) + 1);
            }
            at(x, y) = d;
        }
    }
    return dist;
}

}  // namespace

Image gaussian_blur(const Image& img, double sigma) {
    const auto kernel = gaussian_kernel(sigma);
    const int radius = int(kernel.size() / 2);
    const int w = img.width();
    const int h = img.height();
    Image tmp(w, h);
    Image out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    const int xx = std::clamp(x + i, 0, w - 1);
                    acc += kernel[size_t(i + radius)] * img.at(xx, y, c);
                }
                tmp.at(x, y, c) = float(acc);
            }
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    const int yy = std::clamp(y + i, 0, h - 1);
                    acc += kernel[size_t(i + radius)] * tmp.at(x, yy, c);
                }
                out.at(x, y, c) = float(std::clamp(acc, 0.0, 1.0));
            }
        }
    }
    return out;
}

Image downsample(const Image& img, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "downsample factor must be >= 1");
    const int w = img.width();
    const int h = img.height();
    const int out_w = (w + k - 1) / k;
    const int out_h = (h + k - 1) / k;
    if (out_w < 2 || out_h < 2) {
        throw Error(ErrorCode::ImageTooSmall, std::to_string(w) + "x" + std::to_string(h) +
                                                  " reduced by " + std::to_string(k) + " is below 2x2");
    }
    if (k == 1) return img;

    const Image blurred = gaussian_blur(img, 0.5 * double(k));
    Image out(out_w, out_h);
    const double center = 0.5 * double(k - 1);
    for (int oy = 0; oy < out_h; ++oy) {
        const double sy = std::min(double(oy) * k + center, double(h - 1));
        const int y0 = int(std::floor(sy));
        const int y1 = std::min(y0 + 1, h - 1);
        const double fy = sy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            const double sx = std::min(double(ox) * k + center, double(w - 1));
            const int x0 = int(std::floor(sx));
            const int x1 = std::min(x0 + 1, w - 1);
            const double fx = sx - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = (1.0 - fx) * blurred.at(x0, y0, c) + fx * blurred.at(x1, y0, c);
                const double bottom = (1.0 - fx) * blurred.at(x0, y1, c) + fx * blurred.at(x1, y1, c);
                out.at(ox, oy, c) = float(std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0));
            }
        }
    }
    return out;
}

BinaryMask upsample_mask(const BinaryMask& mask, int target_w, int target_h) {
    if (target_w < mask.width() || target_h < mask.height()) {
        throw Error(ErrorCode::InvalidTarget, "upsample target " + std::to_string(target_w) + "x" +
                                                  std::to_string(target_h) + " is smaller than source " +
                                                  std::to_string(mask.width()) + "x" +
                                                  std::to_string(mask.height()));
    }
    BinaryMask out(target_w, target_h);
    const double sx = double(mask.width()) / double(target_w);
    const double sy = double(mask.height()) / double(target_h);
    for (int y = 0; y < target_h; ++y) {
        const int src_y = std::min(int(std::floor((y + 0.5) * sy)), mask.height() - 1);
        for (int x = 0; x < target_w; ++x) {
            const int src_x = std::min(int(std::floor((x + 0.5) * sx)), mask.width() - 1);
            out.set(x, y, mask.foreground(src_x, src_y));
        }
    }
    return out;
}

BinaryMask crop_mask(const BinaryMask& mask, int w, int h) {
    if (w > mask.width() || h > mask.height()) {
        throw Error(ErrorCode::InvalidTarget, "crop larger than mask");
    }
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.set(x, y, mask.foreground(x, y));
    return out;
}

std::array<double, 3> srgb_to_lab(double r, double g, double b) {
    const double lr = srgb_to_linear(r);
    const double lg = srgb_to_linear(g);
    const double lb = srgb_to_linear(b);
    const double x = 0.4124564 * lr + 0.3575761 * lg + 0.1804375 * lb;
    const double y = 0.2126729 * lr + 0.7151522 * lg + 0.0721750 * lb;
    const double z = 0.0193339 * lr + 0.1191920 * lg + 0.9503041 * lb;
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::array<double, 3> lab_to_srgb(double l, double a, double b) {
    const double fy = (l + 16.0) / 116.0;
    const double fx = fy + a / 500.0;
    const double fz = fy - b / 200.0;
    const double x = kWhiteX * lab_f_inv(fx);
    const double y = kWhiteY * lab_f_inv(fy);
    const double z = kWhiteZ * lab_f_inv(fz);
    const double lr = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    const double lg = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    const double lb = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
    return {linear_to_srgb(lr), linear_to_srgb(lg), linear_to_srgb(lb)};
}

LabImage rgb_to_lab(const Image& img) {
    LabImage out(img.width(), img.height());
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        const auto p = img.pixel(i);
        const auto lab = srgb_to_lab(p[0], p[1], p[2]);
        for (int c = 0; c < 3; ++c) out.data()[i * 3 + size_t(c)] = float(lab[size_t(c)]);
    }
    return out;
}

Image lab_to_rgb(const LabImage& lab) {
    Image out(lab.width(), lab.height());
    for (size_t i = 0; i < lab.pixel_count(); ++i) {
        const auto p = lab.pixel(i);
        const auto rgb = lab_to_srgb(p[0], p[1], p[2]);
        for (int c = 0; c < 3; ++c) out.data()[i * 3 + size_t(c)] = float(std::clamp(rgb[size_t(c)], 0.0, 1.0));
    }
    return out;
}

std::vector<int> opposite_label_distance(const BinaryMask& mask) {
    const size_t fg = mask.foreground_count();
    if (fg == 0 || fg == mask.pixel_count()) {
        return std::vector<int>(mask.pixel_count(), std::numeric_limits<int>::max());
    }
    const auto to_fg = chessboard_distance(mask, true);
    const auto to_bg = chessboard_distance(mask, false);
    std::vector<int> out(mask.pixel_count());
    for (size_t i = 0; i < out.size(); ++i) out[i] = mask.foreground(i) ? to_bg[i] : to_fg[i];
    return out;
}

std::vector<std::uint8_t> band_flags(const BinaryMask& mask, int r) {
    if (r < 1) throw Error(ErrorCode::InvalidArgument, "band radius must be >= 1");
    const auto dist = opposite_label_distance(mask);
    std::vector<std::uint8_t> flags(dist.size());
    for (size_t i = 0; i < dist.size(); ++i) flags[i] = dist[i] <= r ? 1 : 0;
    return flags;
}

std::vector<PixelCoord> band_around_boundary(const BinaryMask& mask, int r) {
    const auto flags = band_flags(mask, r);
    std::vector<PixelCoord> out;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (flags[mask.index(x, y)]) out.push_back({x, y});
    return out;
}

}  // namespace matteforge
