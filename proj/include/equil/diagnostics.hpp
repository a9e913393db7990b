// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_DIAGNOSTICS_HPP_
#define EQUIL_DIAGNOSTICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "algorithms.hpp"
#include "error.hpp"
#include "sparse_matrix.hpp"

namespace equil
{

enum class RatioSide
{
    rows,
    cols,
    max_of_both,
};

/// Largest over smallest row (or column) 2-norm; 1 iff binormalized.
struct RatioMetric
{
    double value;
    RatioSide side;
};

namespace detail
{

inline double max_over_min(const std::vector<double>& sq_norms, const char* what)
{
    const auto [lo, hi] = std::minmax_element(sq_norms.begin(), sq_norms.end());
    if (!(*lo > 0.0))
        throw ZeroRowOrColumn(what, static_cast<std::size_t>(lo - sq_norms.begin()));
    return std::sqrt(*hi / *lo);
}

} // namespace detail

/**
 * Ratio of diag(left) A diag(right) computed without forming the scaled
 * matrix. With RatioSide::max_of_both the larger of the row and column
 * ratios is returned.
 */
inline RatioMetric scaled_ratio(const SparseMatrix& a, const DiagonalScaling& s,
                                RatioSide side = RatioSide::max_of_both)
{
    if (s.left().size() != a.nrows() || s.right().size() != a.ncols())
        throw DimensionMismatch("scaled_ratio: scaling size does not match matrix");
    std::vector<double> rows(a.nrows(), 0.0), cols(a.ncols(), 0.0);
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        const auto c = a.row_cols(i);
        const auto v = a.row_values(i);
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double e = s.left()[i] * v[k] * s.right()[c[k]];
            rows[i] += e * e;
            cols[c[k]] += e * e;
        }
    }
    switch (side) {
    case RatioSide::rows:
        return {detail::max_over_min(rows, "zero row"), side};
    case RatioSide::cols:
        return {detail::max_over_min(cols, "zero column"), side};
    case RatioSide::max_of_both:
        break;
    }
    return {std::max(detail::max_over_min(rows, "zero row"),
                     detail::max_over_min(cols, "zero column")),
            side};
}

inline RatioMetric ratio(const SparseMatrix& m, RatioSide side = RatioSide::max_of_both)
{
    return scaled_ratio(m, DiagonalScaling::identity(m.nrows(), m.ncols()), side);
}

inline Eigen::MatrixXd to_dense(const SparseMatrix& m)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.nrows()),
                                              static_cast<Eigen::Index>(m.ncols()));
    for (const Triplet& t : m.triplets())
        d(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
    return d;
}

inline constexpr std::size_t default_condition_cap = 2000;

/**
 * 2-norm condition number sigma_max / sigma_min from a dense SVD. Returns
 * +infinity when sigma_min <= n * eps * sigma_max (numerically singular).
 */
inline double condition_number(const SparseMatrix& m, std::size_t cap = default_condition_cap)
{
    if (!m.is_square())
        throw DimensionMismatch("condition_number: matrix must be square");
    if (m.nrows() > cap)
        throw SizeCapExceeded("condition_number: n = " + std::to_string(m.nrows())
                              + " exceeds cap " + std::to_string(cap));
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(to_dense(m));
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (!(smax > 0.0)
        || smin <= static_cast<double>(m.nrows()) * std::numeric_limits<double>::epsilon() * smax)
        return std::numeric_limits<double>::infinity();
    return smax / smin;
}

/// Population variance of s = (m o m) e.
inline double row_sum_variance(const SparseMatrix& m)
{
    if (!m.is_square())
        throw DimensionMismatch("row_sum_variance: matrix must be square");
    std::vector<double> s(m.nrows(), 0.0);
    for (std::size_t i = 0; i < m.nrows(); ++i)
        for (double v : m.row_values(i))
            s[i] += v * v;
    const double n = static_cast<double>(s.size());
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double var = 0.0;
    for (double e : s)
        var += (e - mean) * (e - mean);
    return var / n;
}

struct HistoryParams
{
    std::size_t nmv = 100;
    std::uint64_t seed = 1;
    ExactOptions exact{};
};

/**
 * log10 ratio of the scaled matrix after each iteration of `alg`. Entry 0 is
 * the unscaled matrix; entry k follows iteration k.
 */
inline std::vector<double> convergence_history(const SparseMatrix& a, Algorithm alg,
                                               const HistoryParams& params = {})
{
    std::vector<double> series{std::log10(ratio(a).value)};
    compute_scaling(a, alg, params.nmv, params.seed, params.exact,
                    [&](std::size_t, const DiagonalScaling& s) {
                        series.push_back(std::log10(scaled_ratio(a, s).value));
                    });
    return series;
}

} // namespace equil

#endif // EQUIL_DIAGNOSTICS_HPP_
