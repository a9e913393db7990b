// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_OPERATOR_HPP_
#define EQUIL_OPERATOR_HPP_

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "sparse_matrix.hpp"

namespace equil
{

/**
 * Matrix-free linear operator: dimensions plus y = A x and y = A^T x.
 *
 * This is the only view of a matrix that the stochastic algorithms receive;
 * there is no element access. Callbacks must be safe to invoke concurrently
 * and must not retain the spans they are given.
 */
class LinearOperator
{
public:
    /// (input, output); input has ncols (resp. nrows for the transpose).
    using Apply = std::function<void(std::span<const double>, std::span<double>)>;

    LinearOperator(std::size_t nrows, std::size_t ncols, Apply apply, Apply apply_transpose)
        : nrows_(nrows), ncols_(ncols), apply_(std::move(apply)),
          apply_transpose_(std::move(apply_transpose))
    {
        if (nrows == 0 || ncols == 0)
            throw std::invalid_argument("LinearOperator: dimensions must be positive");
        if (!apply_ || !apply_transpose_)
            throw std::invalid_argument("LinearOperator: both callbacks are required");
    }

    std::size_t nrows() const noexcept { return nrows_; }
    std::size_t ncols() const noexcept { return ncols_; }
    bool is_square() const noexcept { return nrows_ == ncols_; }

    void apply(std::span<const double> x, std::span<double> y) const
    {
        if (x.size() != ncols_ || y.size() != nrows_)
            throw DimensionMismatch("LinearOperator::apply: vector size mismatch");
        apply_(x, y);
    }

    void apply_transpose(std::span<const double> x, std::span<double> y) const
    {
        if (x.size() != nrows_ || y.size() != ncols_)
            throw DimensionMismatch("LinearOperator::apply_transpose: vector size mismatch");
        apply_transpose_(x, y);
    }

    std::vector<double> apply(std::span<const double> x) const
    {
        std::vector<double> y(nrows_);
        apply(x, y);
        return y;
    }

    std::vector<double> apply_transpose(std::span<const double> x) const
    {
        std::vector<double> y(ncols_);
        apply_transpose(x, y);
        return y;
    }

private:
    std::size_t nrows_;
    std::size_t ncols_;
    Apply apply_;
    Apply apply_transpose_;
};

inline LinearOperator from_sparse(SparseMatrix m)
{
    auto shared = std::make_shared<const SparseMatrix>(std::move(m));
    const std::size_t nr = shared->nrows(), nc = shared->ncols();
    return LinearOperator(
        nr, nc,
        [shared](std::span<const double> x, std::span<double> y) { shared->multiply(x, y); },
        [shared](std::span<const double> x, std::span<double> y) {
            shared->multiply_transpose(x, y);
        });
}

inline LinearOperator from_dense(Eigen::MatrixXd m)
{
    auto shared = std::make_shared<const Eigen::MatrixXd>(std::move(m));
    const auto nr = static_cast<std::size_t>(shared->rows());
    const auto nc = static_cast<std::size_t>(shared->cols());
    return LinearOperator(
        nr, nc,
        [shared](std::span<const double> x, std::span<double> y) {
            Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
            Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
            yv.noalias() = *shared * xv;
        },
        [shared](std::span<const double> x, std::span<double> y) {
            Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
            Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
            yv.noalias() = shared->transpose() * xv;
        });
}

/// Thread-safe mvp counters shared by a counting wrapper and its copies.
struct MvpCounts
{
    std::atomic<std::size_t> apply{0};
    std::atomic<std::size_t> apply_transpose{0};
};

/// Wraps an operator and counts every product it forwards.
inline LinearOperator counting(const LinearOperator& inner, std::shared_ptr<MvpCounts> counts)
{
    return LinearOperator(
        inner.nrows(), inner.ncols(),
        [inner, counts](std::span<const double> x, std::span<double> y) {
            counts->apply.fetch_add(1, std::memory_order_relaxed);
            inner.apply(x, y);
        },
        [inner, counts](std::span<const double> x, std::span<double> y) {
            counts->apply_transpose.fetch_add(1, std::memory_order_relaxed);
            inner.apply_transpose(x, y);
        });
}

} // namespace equil

#endif // EQUIL_OPERATOR_HPP_
