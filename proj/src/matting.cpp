#include "matteforge/matting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "matteforge/error.hpp"

namespace matteforge {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 invert_symmetric(const Mat3& m) {
    const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    const double inv_det = 1.0 / det;
    Mat3 inv;
    inv[0][0] = c00 * inv_det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
    inv[1][0] = c01 * inv_det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
    inv[2][0] = c02 * inv_det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
    return inv;
}

}  // namespace

void MattingConfig::validate() const {
    if (window_radius < 1) throw Error(ErrorCode::InvalidArgument, "matting window radius must be >= 1");
    if (!(epsilon > 0) || !(lambda > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon and lambda must be > 0");
    if (!(solver_tol > 0) || solver_max_iters < 1) {
        throw Error(ErrorCode::InvalidArgument, "solver tolerance and iteration cap must be positive");
    }
}

std::vector<std::uint8_t> AlphaMatte::gray_values() const {
    std::vector<std::uint8_t> out(alpha_.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::uint8_t(std::lround(std::clamp(alpha_[i], 0.0, 1.0) * 255.0));
    return out;
}

MattingLaplacian build_laplacian(const Image& img, const MattingConfig& cfg) {
    cfg.validate();
    const int r = cfg.window_radius;
    const int side = 2 * r + 1;
    const int w = img.width();
    const int h = img.height();
    if (w < side || h < side) {
        throw Error(ErrorCode::ImageTooSmall, "matting needs at least " + std::to_string(side) + "x" +
                                                  std::to_string(side) + " pixels");
    }
    const size_t n_pixels = img.pixel_count();
    const int reach = 2 * r;  // pixels sharing a window are at most 2r apart
    const int stencil_side = 2 * reach + 1;
    const size_t stencil = size_t(stencil_side) * size_t(stencil_side);
    std::vector<double> dense(n_pixels * stencil, 0.0);
    std::vector<std::uint8_t> touched(n_pixels * stencil, 0);

    const int n = side * side;
    const double inv_n = 1.0 / double(n);
    std::vector<std::array<double, 3>> colors(static_cast<size_t>(n));
    std::vector<size_t> members(static_cast<size_t>(n));
    std::vector<std::array<double, 3>> projected(static_cast<size_t>(n));

    for (int cy = r; cy < h - r; ++cy) {
        for (int cx = r; cx < w - r; ++cx) {
            std::array<double, 3> mu{};
            int k = 0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx, ++k) {
                    const auto p = img.pixel(cx + dx, cy + dy);
                    colors[size_t(k)] = {p[0], p[1], p[2]};
                    members[size_t(k)] = img.index(cx + dx, cy + dy);
                    for (int c = 0; c < 3; ++c) mu[size_t(c)] += p[size_t(c)];
                }
            }
            for (double& m : mu) m *= inv_n;
            Mat3 cov{};
            for (int i = 0; i < n; ++i) {
                auto& col = colors[size_t(i)];
                for (int c = 0; c < 3; ++c) col[size_t(c)] -= mu[size_t(c)];
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) cov[size_t(a)][size_t(b)] += col[size_t(a)] * col[size_t(b)];
            }
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) cov[size_t(a)][size_t(b)] *= inv_n;
                cov[size_t(a)][size_t(a)] += cfg.epsilon * inv_n;
            }
            const Mat3 inv = invert_symmetric(cov);
            for (int i = 0; i < n; ++i) {
                const auto& col = colors[size_t(i)];
                for (int a = 0; a < 3; ++a) {
                    projected[size_t(i)][size_t(a)] =
                        inv[size_t(a)][0] * col[0] + inv[size_t(a)][1] * col[1] + inv[size_t(a)][2] * col[2];
                }
            }
            // Each pair is computed once and written to both slots so the
            // assembled matrix is exactly symmetric.
            const auto slot_of = [&](size_t from, size_t to) {
                const int dx = int(to % size_t(w)) - int(from % size_t(w));
                const int dy = int(to / size_t(w)) - int(from / size_t(w));
                return from * stencil + size_t(dy + reach) * size_t(stencil_side) + size_t(dx + reach);
            };
            for (int i = 0; i < n; ++i) {
                const size_t pi = members[size_t(i)];
                const auto& pr = projected[size_t(i)];
                for (int j = i; j < n; ++j) {
                    const size_t pj = members[size_t(j)];
                    const auto& cj = colors[size_t(j)];
                    const double quad = pr[0] * cj[0] + pr[1] * cj[1] + pr[2] * cj[2];
                    const double v = (i == j ? 1.0 : 0.0) - inv_n * (1.0 + quad);
                    const size_t a = slot_of(pi, pj);
                    dense[a] += v;
                    touched[a] = 1;
                    if (i != j) {
                        const size_t b = slot_of(pj, pi);
                        dense[b] += v;
                        touched[b] = 1;
                    }
                }
            }
        }
    }

    std::vector<size_t> row_ptr(n_pixels + 1, 0);
    std::vector<int> cols;
    std::vector<double> values;
    cols.reserve(n_pixels * size_t(n));
    values.reserve(n_pixels * size_t(n));
    for (size_t p = 0; p < n_pixels; ++p) {
        const int x = int(p % size_t(w));
        const int y = int(p / size_t(w));
        for (int dy = -reach; dy <= reach; ++dy) {
            for (int dx = -reach; dx <= reach; ++dx) {
                const size_t slot = p * stencil + size_t(dy + reach) * size_t(stencil_side) + size_t(dx + reach);
                if (!touched[slot]) continue;
                cols.push_back(int(size_t(y + dy) * size_t(w) + size_t(x + dx)));
                values.push_back(dense[slot]);
            }
        }
        row_ptr[p + 1] = cols.size();
    }
    return MattingLaplacian{w, h, SparseMatrix(n_pixels, std::move(row_ptr), std::move(cols), std::move(values))};
}

AlphaSolution solve_alpha_detailed(const MattingLaplacian& lap, const Trimap& trimap, const MattingConfig& cfg,
                                   const Deadline& deadline) {
    cfg.validate();
    if (trimap.width() != lap.width || trimap.height() != lap.height) {
        throw Error(ErrorCode::DimensionMismatch, "trimap and Laplacian sizes differ");
    }
    const size_t n = trimap.pixel_count();
    AlphaSolution out;
    const bool has_fg = trimap.count(TrimapLabel::Foreground) > 0;
    const bool has_bg = trimap.count(TrimapLabel::Background) > 0;
    if (!has_fg || !has_bg) {
        const double fill = has_fg ? 1.0 : 0.0;
        out.raw.assign(n, fill);
        out.matte = AlphaMatte(lap.width, lap.height, fill);
        return out;
    }

    std::vector<double> penalty(n, 0.0);
    std::vector<double> rhs(n, 0.0);
    std::vector<double> x0(n, 0.5);
    for (size_t i = 0; i < n; ++i) {
        switch (trimap.at(i)) {
            case TrimapLabel::Foreground:
                penalty[i] = cfg.lambda;
                rhs[i] = cfg.lambda;
                x0[i] = 1.0;
                break;
            case TrimapLabel::Background:
                penalty[i] = cfg.lambda;
                x0[i] = 0.0;
                break;
            case TrimapLabel::Unknown: break;
        }
    }
    const SparseMatrix system = lap.matrix.plus_diagonal(penalty);
    const JacobiPcgSolver solver(cfg.solver_tol, cfg.solver_max_iters, deadline);
    SolveResult result = solver.solve(system, rhs, x0);
    if (!result.converged) {
        throw Error(ErrorCode::SolverDidNotConverge,
                    "relative residual " + std::to_string(result.relative_residual) + " after " +
                        std::to_string(result.iterations) + " iterations")
            .with_residual(result.relative_residual);
    }
    out.iterations = result.iterations;
    out.relative_residual = result.relative_residual;
    std::vector<double> clamped(n);
    for (size_t i = 0; i < n; ++i) clamped[i] = std::clamp(result.x[i], 0.0, 1.0);
    out.raw = std::move(result.x);
    out.matte = AlphaMatte(lap.width, lap.height, std::move(clamped));
    return out;
}

AlphaMatte solve_alpha(const MattingLaplacian& lap, const Trimap& trimap, const MattingConfig& cfg) {
    return solve_alpha_detailed(lap, trimap, cfg).matte;
}

double matting_energy(const MattingLaplacian& lap, const Trimap& trimap, double lambda,
                      const std::vector<double>& alpha) {
    double energy = lap.matrix.quadratic_form(alpha);
    for (size_t i = 0; i < alpha.size(); ++i) {
        const auto label = trimap.at(i);
        if (label == TrimapLabel::Unknown) continue;
        const double target = label == TrimapLabel::Foreground ? 1.0 : 0.0;
        energy += lambda * (alpha[i] - target) * (alpha[i] - target);
    }
    return energy;
}

BinaryMask binarize(const AlphaMatte& matte) {
    BinaryMask mask(matte.width(), matte.height());
    for (size_t i = 0; i < mask.pixel_count(); ++i) mask.set(i, matte.at(i) >= 0.5);
    return mask;
}

AlphaMatte matte_from_mask(const BinaryMask& mask) {
    std::vector<double> alpha(mask.pixel_count());
    for (size_t i = 0; i < alpha.size(); ++i) alpha[i] = mask.foreground(i) ? 1.0 : 0.0;
    return AlphaMatte(mask.width(), mask.height(), std::move(alpha));
}

}  // namespace matteforge
