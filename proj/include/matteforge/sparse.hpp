#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "matteforge/deadline.hpp"

namespace matteforge {

/// Compressed sparse row matrix. Column indices are sorted within each row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(size_t n, std::vector<size_t> row_ptr, std::vector<int> cols, std::vector<double> values);

    size_t size() const noexcept { return n_; }
    size_t nonzeros() const noexcept { return values_.size(); }

    /// Entry (i, j), zero when not stored.
    double at(size_t i, size_t j) const;
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> diagonal() const;
    /// Copy with `d` added to the diagonal (diagonal entries must be stored).
    SparseMatrix plus_diagonal(std::span<const double> d) const;
    /// x^T A x
    double quadratic_form(std::span<const double> x) const;

    const std::vector<size_t>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<int>& cols() const noexcept { return cols_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    size_t n_ = 0;
    std::vector<size_t> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> values_;
};

struct SolveResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;  // ||b - Ax|| / ||b||
    bool converged = false;
};

/// Solver for symmetric positive (semi)definite systems.
class LinearSolver {
public:
    virtual ~LinearSolver() = default;
    virtual SolveResult solve(const SparseMatrix& a, std::span<const double> b, std::span<const double> x0) const = 0;
};

/// Conjugate gradient with diagonal (Jacobi) preconditioning, stopping on
/// relative residual.
class JacobiPcgSolver final : public LinearSolver {
public:
    JacobiPcgSolver(double tolerance, int max_iterations, Deadline deadline = {})
        : tolerance_(tolerance), max_iterations_(max_iterations), deadline_(deadline) {}

    SolveResult solve(const SparseMatrix& a, std::span<const double> b, std::span<const double> x0) const override;

private:
    double tolerance_;
    int max_iterations_;
    Deadline deadline_;
};

}  // namespace matteforge
