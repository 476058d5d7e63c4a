#include "matteforge/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "matteforge/error.hpp"

namespace matteforge {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

SparseMatrix::SparseMatrix(size_t n, std::vector<size_t> row_ptr, std::vector<int> cols, std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
    if (row_ptr_.size() != n_ + 1 || cols_.size() != values_.size() || row_ptr_.back() != values_.size()) {
        throw Error(ErrorCode::InvalidArgument, "inconsistent CSR arrays");
    }
}

double SparseMatrix::at(size_t i, size_t j) const {
    const auto begin = cols_.begin() + std::ptrdiff_t(row_ptr_[i]);
    const auto end = cols_.begin() + std::ptrdiff_t(row_ptr_[i + 1]);
    const auto it = std::lower_bound(begin, end, int(j));
    if (it == end || *it != int(j)) return 0.0;
    return values_[size_t(it - cols_.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[size_t(cols_[k])];
        y[i] = s;
    }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_);
    multiply(x, y);
    return y;
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(n_);
    for (size_t i = 0; i < n_; ++i) d[i] = at(i, i);
    return d;
}

SparseMatrix SparseMatrix::plus_diagonal(std::span<const double> d) const {
    SparseMatrix out = *this;
    for (size_t i = 0; i < n_; ++i) {
        if (d[i] == 0.0) continue;
        const auto begin = out.cols_.begin() + std::ptrdiff_t(row_ptr_[i]);
        const auto end = out.cols_.begin() + std::ptrdiff_t(row_ptr_[i + 1]);
        const auto it = std::lower_bound(begin, end, int(i));
        if (it == end || *it != int(i)) throw Error(ErrorCode::InvalidArgument, "diagonal entry not stored");
        out.values_[size_t(it - out.cols_.begin())] += d[i];
    }
    return out;
}

double SparseMatrix::quadratic_form(std::span<const double> x) const {
    const auto ax = multiply(x);
    return dot(x, ax);
}

SolveResult JacobiPcgSolver::solve(const SparseMatrix& a, std::span<const double> b,
                                   std::span<const double> x0) const {
    const size_t n = a.size();
    SolveResult result;
    result.x.assign(x0.begin(), x0.end());

    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0.0) {
        // Ax = 0 has the zero solution.
        std::fill(result.x.begin(), result.x.end(), 0.0);
        result.converged = true;
        return result;
    }

    std::vector<double> inv_diag = a.diagonal();
    for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

    std::vector<double> r(n), z(n), p(n), ap(n);
    auto true_residual = [&] {
        a.multiply(result.x, r);
        for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        return std::sqrt(dot(r, r)) / b_norm;
    };

    // The recurrence residual drifts from the true one; restart from the
    // current iterate until the true residual meets the tolerance.
    constexpr int kMaxRestarts = 8;
    result.relative_residual = true_residual();
    for (int restart = 0; restart <= kMaxRestarts; ++restart) {
        if (result.relative_residual <= tolerance_ || result.iterations >= max_iterations_) break;
        for (size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        p = z;
        double rz = dot(r, z);
        double estimate = result.relative_residual;
        while (estimate > tolerance_ && result.iterations < max_iterations_) {
            deadline_.check("matting");
            a.multiply(p, ap);
            const double pap = dot(p, ap);
            if (!(pap > 0.0)) break;
            const double step = rz / pap;
            for (size_t i = 0; i < n; ++i) {
                result.x[i] += step * p[i];
                r[i] -= step * ap[i];
            }
            for (size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
            ++result.iterations;
            estimate = std::sqrt(dot(r, r)) / b_norm;
        }
        result.relative_residual = true_residual();
    }
    result.converged = result.relative_residual <= tolerance_;
    return result;
}

}  // namespace matteforge
