// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_SPARSE_MATRIX_HPP_
#define EQUIL_SPARSE_MATRIX_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace equil
{

struct Triplet
{
    std::size_t row;
    std::size_t col;
    double value;

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

/**
 * Immutable real sparse matrix in compressed sparse row form.
 *
 * Construction sorts entries row-major, sums duplicate (row, col) pairs and
 * drops entries whose (summed) value is exactly zero.
 */
class SparseMatrix
{
public:
    SparseMatrix() = default;

    SparseMatrix(std::size_t nrows, std::size_t ncols, std::vector<Triplet> entries)
        : nrows_(nrows), ncols_(ncols), row_ptr_(nrows + 1, 0)
    {
        if (nrows == 0 || ncols == 0)
            throw std::invalid_argument("SparseMatrix: dimensions must be positive");
        for (const Triplet& t : entries) {
            if (t.row >= nrows || t.col >= ncols)
                throw std::out_of_range("SparseMatrix: entry (" + std::to_string(t.row) + ", "
                                        + std::to_string(t.col) + ") out of range");
            if (!std::isfinite(t.value))
                throw std::invalid_argument("SparseMatrix: non-finite value");
        }
        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });

        col_idx_.reserve(entries.size());
        values_.reserve(entries.size());
        std::vector<std::size_t> row_of;
        row_of.reserve(entries.size());
        for (std::size_t k = 0; k < entries.size();) {
            const std::size_t r = entries[k].row, c = entries[k].col;
            double sum = 0.0;
            for (; k < entries.size() && entries[k].row == r && entries[k].col == c; ++k)
                sum += entries[k].value;
            if (sum != 0.0) {
                col_idx_.push_back(c);
                values_.push_back(sum);
                ++row_ptr_[r + 1];
            }
        }
        for (std::size_t i = 0; i < nrows_; ++i)
            row_ptr_[i + 1] += row_ptr_[i];
    }

    std::size_t nrows() const noexcept { return nrows_; }
    std::size_t ncols() const noexcept { return ncols_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    bool is_square() const noexcept { return nrows_ == ncols_; }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    std::span<const std::size_t> row_cols(std::size_t i) const noexcept
    {
        return std::span(col_idx_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
    }
    std::span<const double> row_values(std::size_t i) const noexcept
    {
        return std::span(values_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
    }

    /// Value at (i, j); zero when not stored.
    double coeff(std::size_t i, std::size_t j) const
    {
        const auto cols = row_cols(i);
        const auto it = std::lower_bound(cols.begin(), cols.end(), j);
        if (it == cols.end() || *it != j)
            return 0.0;
        return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
    }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const
    {
        if (x.size() != ncols_ || y.size() != nrows_)
            throw DimensionMismatch("SparseMatrix::multiply: vector size mismatch");
        for (std::size_t i = 0; i < nrows_; ++i) {
            double sum = 0.0;
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                sum += values_[k] * x[col_idx_[k]];
            y[i] = sum;
        }
    }

    /// y = A^T x
    void multiply_transpose(std::span<const double> x, std::span<double> y) const
    {
        if (x.size() != nrows_ || y.size() != ncols_)
            throw DimensionMismatch("SparseMatrix::multiply_transpose: vector size mismatch");
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t i = 0; i < nrows_; ++i)
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                y[col_idx_[k]] += values_[k] * x[i];
    }

    std::vector<double> operator*(std::span<const double> x) const
    {
        std::vector<double> y(nrows_);
        multiply(x, y);
        return y;
    }

    std::vector<Triplet> triplets() const
    {
        std::vector<Triplet> out;
        out.reserve(nnz());
        for (std::size_t i = 0; i < nrows_; ++i)
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                out.push_back({i, col_idx_[k], values_[k]});
        return out;
    }

    SparseMatrix transpose() const
    {
        std::vector<Triplet> t;
        t.reserve(nnz());
        for (const Triplet& e : triplets())
            t.push_back({e.col, e.row, e.value});
        return SparseMatrix(ncols_, nrows_, std::move(t));
    }

    /// Exact (bitwise) numerical symmetry.
    bool is_symmetric() const
    {
        if (!is_square())
            return false;
        for (std::size_t i = 0; i < nrows_; ++i)
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                if (coeff(col_idx_[k], i) != values_[k])
                    return false;
        return true;
    }

    bool is_nonnegative() const
    {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
    }

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    std::size_t nrows_ = 0;
    std::size_t ncols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

inline SparseMatrix identity(std::size_t n)
{
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        t.push_back({i, i, 1.0});
    return SparseMatrix(n, n, std::move(t));
}

inline SparseMatrix diagonal(std::span<const double> d)
{
    std::vector<Triplet> t;
    t.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        t.push_back({i, i, d[i]});
    return SparseMatrix(d.size(), d.size(), std::move(t));
}

/// Row-major dense initialiser, mostly for small literals.
inline SparseMatrix from_rows(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty() || rows.front().empty())
        throw std::invalid_argument("from_rows: empty matrix");
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size())
            throw std::invalid_argument("from_rows: ragged rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            t.push_back({i, j, rows[i][j]});
    }
    return SparseMatrix(rows.size(), rows.front().size(), std::move(t));
}

/// Positive diagonal scaling diag(left) * A * diag(right).
class DiagonalScaling
{
public:
    DiagonalScaling(std::vector<double> left, std::vector<double> right)
        : left_(std::move(left)), right_(std::move(right))
    {
        auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
        if (!std::all_of(left_.begin(), left_.end(), positive)
            || !std::all_of(right_.begin(), right_.end(), positive))
            throw std::invalid_argument("DiagonalScaling: entries must be positive and finite");
    }

    /// Symmetric scaling X A X.
    static DiagonalScaling symmetric(std::vector<double> x)
    {
        std::vector<double> y = x;
        return DiagonalScaling(std::move(x), std::move(y));
    }

    static DiagonalScaling identity(std::size_t nrows, std::size_t ncols)
    {
        return DiagonalScaling(std::vector<double>(nrows, 1.0), std::vector<double>(ncols, 1.0));
    }

    const std::vector<double>& left() const noexcept { return left_; }
    const std::vector<double>& right() const noexcept { return right_; }

    DiagonalScaling inverse() const
    {
        std::vector<double> l(left_.size()), r(right_.size());
        std::transform(left_.begin(), left_.end(), l.begin(), [](double v) { return 1.0 / v; });
        std::transform(right_.begin(), right_.end(), r.begin(), [](double v) { return 1.0 / v; });
        return DiagonalScaling(std::move(l), std::move(r));
    }

private:
    std::vector<double> left_;
    std::vector<double> right_;
};

/// Called after every iteration of an iterative scaling algorithm with the
/// scaling implied by the current iterate.
using ScalingObserver = std::function<void(std::size_t iteration, const DiagonalScaling&)>;

/// B = A o A
inline SparseMatrix elementwise_square(const SparseMatrix& m)
{
    std::vector<Triplet> t = m.triplets();
    for (Triplet& e : t)
        e.value *= e.value;
    return SparseMatrix(m.nrows(), m.ncols(), std::move(t));
}

/// Entry (i, j) of the result is left[i] * m(i, j) * right[j].
inline SparseMatrix scale(const SparseMatrix& m, const DiagonalScaling& s)
{
    if (s.left().size() != m.nrows() || s.right().size() != m.ncols())
        throw DimensionMismatch("scale: scaling size does not match matrix");
    std::vector<Triplet> t = m.triplets();
    // Forming left[i] * right[j] first keeps a symmetric scaling of a
    // symmetric matrix exactly symmetric.
    for (Triplet& e : t)
        e.value *= s.left()[e.row] * s.right()[e.col];
    return SparseMatrix(m.nrows(), m.ncols(), std::move(t));
}

} // namespace equil

#endif // EQUIL_SPARSE_MATRIX_HPP_
