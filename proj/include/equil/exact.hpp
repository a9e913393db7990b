// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_EXACT_HPP_
#define EQUIL_EXACT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "error.hpp"
#include "sparse_matrix.hpp"

namespace equil
{

struct ExactOptions
{
    /// Converged when every scaled row and column sum is within tol of 1.
    double tol = 1e-10;
    std::size_t max_iters = 10000;
    /// Starting vector (c^0 for the nonsymmetric iteration, y^0 for the
    /// symmetric one). Defaults to all ones.
    std::optional<std::vector<double>> start;
};

struct IterationRecord
{
    std::size_t iteration;
    double row_deviation;
    double col_deviation;
};

using ConvergenceHistory = std::vector<IterationRecord>;

struct ExactResult
{
    DiagonalScaling scaling;
    ConvergenceHistory history;
    /// False when max_iters ran out; `scaling` then holds the best iterate.
    bool converged = false;
};

struct SymmetricExactResult
{
    std::vector<double> x;
    ConvergenceHistory history;
    bool converged = false;
};

namespace detail
{

inline void validate(const ExactOptions& opts)
{
    if (!(opts.tol > 0.0))
        throw std::invalid_argument("ExactOptions: tol must be positive");
    if (opts.max_iters < 1)
        throw std::invalid_argument("ExactOptions: max_iters must be at least 1");
}

inline std::vector<double> start_vector(const ExactOptions& opts, std::size_t n)
{
    if (!opts.start)
        return std::vector<double>(n, 1.0);
    if (opts.start->size() != n)
        throw DimensionMismatch("ExactOptions: start vector has wrong size");
    for (double v : *opts.start)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("ExactOptions: start vector must be positive");
    return *opts.start;
}

inline void require_nonnegative_square(const SparseMatrix& b, const char* who)
{
    if (!b.is_square())
        throw DimensionMismatch(std::string(who) + ": matrix must be square");
    if (!b.is_nonnegative())
        throw std::invalid_argument(std::string(who) + ": matrix must be nonnegative");
}

/// Throws when some row (or column) of `m` has no stored entry.
inline void require_no_empty_lines(const SparseMatrix& m)
{
    std::vector<bool> col_seen(m.ncols(), false);
    for (std::size_t i = 0; i < m.nrows(); ++i) {
        if (m.row_cols(i).empty())
            throw ZeroRowOrColumn("zero row", i);
        for (std::size_t j : m.row_cols(i))
            col_seen[j] = true;
    }
    for (std::size_t j = 0; j < m.ncols(); ++j)
        if (!col_seen[j])
            throw ZeroRowOrColumn("zero column", j);
}

/// out = 1 / in, elementwise; throws on a zero (or underflowed) component.
inline void reciprocal(std::span<const double> in, std::span<double> out, const char* what)
{
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (!(in[i] > 0.0) || !std::isfinite(1.0 / in[i]))
            throw ZeroRowOrColumn(what, i);
        out[i] = 1.0 / in[i];
    }
}

inline double max_deviation(std::span<const double> scale, std::span<const double> product)
{
    double dev = 0.0;
    for (std::size_t i = 0; i < scale.size(); ++i)
        dev = std::max(dev, std::abs(scale[i] * product[i] - 1.0));
    return dev;
}

} // namespace detail

/**
 * Sinkhorn-Knopp iteration r <- 1 / (B c), c <- 1 / (B^T r) on a square
 * nonnegative matrix.
 *
 * On convergence diag(r) B diag(c) is doubly stochastic within `tol`. If the
 * pattern has support but not total support the scalings diverge; the run
 * then stops at max_iters and returns the iterate with the smallest
 * deviation, flagged as not converged.
 */
inline ExactResult sinkhorn_knopp(const SparseMatrix& b, const ExactOptions& opts = {},
                                  const ScalingObserver& observer = {})
{
    detail::validate(opts);
    detail::require_nonnegative_square(b, "sinkhorn_knopp");
    detail::require_no_empty_lines(b);

    const std::size_t n = b.nrows();
    std::vector<double> c = detail::start_vector(opts, n);
    std::vector<double> r(n), bc(n), btr(n);
    std::vector<double> best_r(n, 1.0), best_c = c;
    double best_dev = std::numeric_limits<double>::infinity();

    ExactResult result{DiagonalScaling::identity(n, n), {}, false};
    b.multiply(c, bc);
    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        detail::reciprocal(bc, r, "B c has a zero component");
        b.multiply_transpose(r, btr);
        detail::reciprocal(btr, c, "B^T r has a zero component");
        b.multiply(c, bc);

        const double row_dev = detail::max_deviation(r, bc);
        const double col_dev = detail::max_deviation(c, btr);
        result.history.push_back({k, row_dev, col_dev});
        if (observer)
            observer(k, DiagonalScaling(r, c));

        const double dev = std::max(row_dev, col_dev);
        if (dev < best_dev) {
            best_dev = dev;
            best_r = r;
            best_c = c;
        }
        if (row_dev < opts.tol && col_dev < opts.tol) {
            result.converged = true;
            break;
        }
    }
    result.scaling = DiagonalScaling(std::move(best_r), std::move(best_c));
    return result;
}

/// One sweep of the plain symmetric iteration: returns 1 / (B y).
inline std::vector<double> symmetric_sk_sweep(const SparseMatrix& b, std::span<const double> y)
{
    std::vector<double> by = b * y;
    std::vector<double> next(by.size());
    detail::reciprocal(by, next, "B y has a zero component");
    return next;
}

/**
 * Symmetric Sinkhorn-Knopp with geometric-mean pairing:
 * y <- 1 / (B y), x = sqrt(y_new * y_old).
 *
 * Only y is iterated; x is formed from adjacent iterates, which removes the
 * period-two oscillation of y and decouples reducible blocks. Convergence is
 * tested on diag(x) B diag(x).
 */
inline SymmetricExactResult sym_sinkhorn_knopp(const SparseMatrix& b, const ExactOptions& opts = {},
                                               const ScalingObserver& observer = {})
{
    detail::validate(opts);
    detail::require_nonnegative_square(b, "sym_sinkhorn_knopp");
    if (!b.is_symmetric())
        throw std::invalid_argument("sym_sinkhorn_knopp: matrix must be symmetric");
    detail::require_no_empty_lines(b);

    const std::size_t n = b.nrows();
    std::vector<double> y = detail::start_vector(opts, n);
    std::vector<double> x(n), bx(n);
    std::vector<double> best_x(n, 1.0);
    double best_dev = std::numeric_limits<double>::infinity();

    SymmetricExactResult result;
    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        std::vector<double> next = symmetric_sk_sweep(b, y);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = std::sqrt(next[i] * y[i]);
        y = std::move(next);

        b.multiply(x, bx);
        const double dev = detail::max_deviation(x, bx);
        result.history.push_back({k, dev, dev});
        if (observer)
            observer(k, DiagonalScaling::symmetric(x));

        if (dev < best_dev) {
            best_dev = dev;
            best_x = x;
        }
        if (dev < opts.tol) {
            result.converged = true;
            break;
        }
    }
    result.x = std::move(best_x);
    return result;
}

enum class SymmetryMode
{
    automatic,        ///< symmetric iteration when the matrix is symmetric
    force_nonsymmetric,
};

/**
 * Equilibrates A in the 2-norm: scales B = A o A to doubly stochastic and
 * returns the elementwise square roots of those scalings, so the scaled A has
 * unit row and column 2-norms.
 */
inline ExactResult equilibrate_2norm(const SparseMatrix& a, const ExactOptions& opts = {},
                                     SymmetryMode mode = SymmetryMode::automatic,
                                     const ScalingObserver& observer = {})
{
    if (!a.is_square())
        throw DimensionMismatch("equilibrate_2norm: matrix must be square");
    const SparseMatrix b = elementwise_square(a);

    auto sqrt_all = [](std::vector<double> v) {
        for (double& e : v)
            e = std::sqrt(e);
        return v;
    };
    auto sqrt_observer = [&](std::size_t k, const DiagonalScaling& s) {
        observer(k, DiagonalScaling(sqrt_all(s.left()), sqrt_all(s.right())));
    };
    ScalingObserver inner = observer ? ScalingObserver(sqrt_observer) : ScalingObserver();

    if (mode == SymmetryMode::automatic && a.is_symmetric()) {
        SymmetricExactResult sym = sym_sinkhorn_knopp(b, opts, inner);
        return {DiagonalScaling::symmetric(sqrt_all(std::move(sym.x))), std::move(sym.history),
                sym.converged};
    }
    ExactResult res = sinkhorn_knopp(b, opts, inner);
    res.scaling = DiagonalScaling(sqrt_all(res.scaling.left()), sqrt_all(res.scaling.right()));
    return res;
}

/**
 * Jacobi scaling of a symmetric matrix: factor 1/sqrt(|a_ii|), or exactly 1
 * where the diagonal entry is zero. Returns the scaling and the scaled matrix.
 */
inline std::pair<DiagonalScaling, SparseMatrix> jacobi_scale(const SparseMatrix& a)
{
    if (!a.is_symmetric())
        throw std::invalid_argument("jacobi_scale: matrix must be symmetric");
    std::vector<double> d(a.nrows());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double aii = std::abs(a.coeff(i, i));
        d[i] = aii == 0.0 ? 1.0 : 1.0 / std::sqrt(aii);
    }
    DiagonalScaling s = DiagonalScaling::symmetric(std::move(d));
    SparseMatrix scaled = scale(a, s);
    return {std::move(s), std::move(scaled)};
}

/// One-pass infinity-norm scaling: rows to unit max-abs, then columns.
inline DiagonalScaling inf_norm_scale(const SparseMatrix& a)
{
    detail::require_no_empty_lines(a);
    std::vector<double> left(a.nrows(), 0.0), right(a.ncols(), 0.0);
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        for (double v : a.row_values(i))
            left[i] = std::max(left[i], std::abs(v));
        left[i] = 1.0 / left[i];
    }
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        const auto cols = a.row_cols(i);
        const auto vals = a.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            right[cols[k]] = std::max(right[cols[k]], std::abs(left[i] * vals[k]));
    }
    for (std::size_t j = 0; j < right.size(); ++j)
        right[j] = 1.0 / right[j];
    return DiagonalScaling(std::move(left), std::move(right));
}

} // namespace equil

#endif // EQUIL_EXACT_HPP_
