#pragma once

#include <cstdint>
#include <vector>

#include "matteforge/deadline.hpp"
#include "matteforge/image.hpp"
#include "matteforge/sparse.hpp"
#include "matteforge/trimap.hpp"

namespace matteforge {

struct MattingConfig {
    /// Window is (2 * window_radius + 1)^2 pixels; 1 gives 3x3.
    int window_radius = 1;
    double epsilon = 1e-5;
    /// Penalty weight tying known pixels to their trimap value.
    double lambda = 100.0;
    double solver_tol = 1e-6;
    int solver_max_iters = 2000;

    void validate() const;
};

/// Per-pixel opacity, row-major.
class AlphaMatte {
public:
    AlphaMatte() = default;
    AlphaMatte(int width, int height, double fill = 0.0)
        : width_(width), height_(height), alpha_(size_t(width) * size_t(height), fill) {}
    AlphaMatte(int width, int height, std::vector<double> alpha)
        : width_(width), height_(height), alpha_(std::move(alpha)) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double at(int x, int y) const { return alpha_[size_t(y) * size_t(width_) + size_t(x)]; }
    double at(size_t linear) const { return alpha_[linear]; }
    const std::vector<double>& values() const noexcept { return alpha_; }

    /// round(alpha * 255) per pixel.
    std::vector<std::uint8_t> gray_values() const;

    friend bool operator==(const AlphaMatte&, const AlphaMatte&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> alpha_;
};

/// Sparse symmetric PSD matrix whose quadratic form is the matting cost
/// with the local affine coefficients eliminated.
struct MattingLaplacian {
    int width = 0;
    int height = 0;
    SparseMatrix matrix;
};

/// For each window w fully inside the image, with color mean mu and
/// population covariance S over its n pixels, accumulates
///   L_ij += delta_ij - (1/n) (1 + (I_i - mu)^T (S + eps/n Id)^-1 (I_j - mu))
/// for all i, j in w. Throws ImageTooSmall when no window fits.
MattingLaplacian build_laplacian(const Image& img, const MattingConfig& cfg);

struct AlphaSolution {
    AlphaMatte matte;          // clamped to [0,1]
    std::vector<double> raw;   // solver output before clamping
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Solves (L + lambda D) alpha = lambda d, D marking known trimap pixels and
/// d holding 1 for foreground, 0 for background. A trimap without both
/// known labels short-circuits to a constant matte. Throws
/// SolverDidNotConverge (with the achieved residual) when the tolerance is
/// not met within solver_max_iters.
AlphaSolution solve_alpha_detailed(const MattingLaplacian& lap, const Trimap& trimap, const MattingConfig& cfg,
                                   const Deadline& deadline = {});
AlphaMatte solve_alpha(const MattingLaplacian& lap, const Trimap& trimap, const MattingConfig& cfg);

/// alpha^T L alpha + lambda * sum over known pixels of (alpha - d)^2.
double matting_energy(const MattingLaplacian& lap, const Trimap& trimap, double lambda,
                      const std::vector<double>& alpha);

/// alpha >= 0.5 is foreground, alpha < 0.5 background.
BinaryMask binarize(const AlphaMatte& matte);

/// Binary mask viewed as a 0/1 matte.
AlphaMatte matte_from_mask(const BinaryMask& mask);

}  // namespace matteforge
