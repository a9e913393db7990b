// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_STOCHASTIC_HPP_
#define EQUIL_STOCHASTIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "error.hpp"
#include "operator.hpp"
#include "random.hpp"
#include "sparse_matrix.hpp"

namespace equil
{

/**
 * Convex-combination weight for iteration k = 1..nmv:
 * omega(k) = (1 - alpha) / 2 + alpha / nmv with alpha = (k - 1) / nmv.
 *
 * Starts at 1/2 and decreases linearly, so early iterations move the
 * iterate a lot and late iterations mostly average.
 */
class OmegaSchedule
{
public:
    explicit OmegaSchedule(std::size_t nmv) : nmv_(nmv)
    {
        if (nmv == 0)
            throw std::invalid_argument("OmegaSchedule: nmv must be positive");
    }

    std::size_t nmv() const noexcept { return nmv_; }

    double operator()(std::size_t k) const
    {
        if (k < 1 || k > nmv_)
            throw std::out_of_range("OmegaSchedule: iteration outside 1..nmv");
        const double n = static_cast<double>(nmv_);
        const double alpha = static_cast<double>(k - 1) / n;
        return (1.0 - alpha) * 0.5 + alpha / n;
    }

private:
    std::size_t nmv_;
};

enum class SsbinMode
{
    /// Combine adjacent iterates for the first min(32, nmv/2) iterations,
    /// then alternate iterates.
    nominal,
    /// Always combine adjacent iterates. Ends worse on reducible matrices; kept
    /// for convergence comparisons.
    no_switch,
};

namespace detail
{

enum class SnbinUpdate
{
    /// Combine the normalised reciprocal scaling with the normalised squared
    /// product, then take the reciprocal (the stable form).
    combine_then_invert,
    /// Combine the scaling with the reciprocal of the squared product.
    /// Test-bench comparison only.
    invert_then_combine,
};

inline double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

/// v <- (1 - omega) v / |v|_1 + omega w / |w|_1, w = y.^2
inline void blend_squared(std::span<double> v, std::span<const double> y, double omega,
                          std::size_t k)
{
    double y2sum = 0.0;
    for (double e : y)
        y2sum += e * e;
    if (!(y2sum > 0.0) || !std::isfinite(y2sum))
        throw DegenerateProbe("squared probe image has zero (or non-finite) 1-norm", k);
    const double vsum = sum(v);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = (1.0 - omega) * v[i] / vsum + omega * y[i] * y[i] / y2sum;
}

/// v holds a scaling r (not its reciprocal):
/// v <- (1 - omega) v / |v|_1 + omega w / |w|_1, w = 1 ./ y.^2
inline void blend_reciprocal_squared(std::span<double> v, std::span<const double> y, double omega,
                                     std::size_t k)
{
    std::vector<double> w(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        w[i] = 1.0 / (y[i] * y[i]);
    const double wsum = sum(w);
    if (!std::isfinite(wsum) || !(wsum > 0.0))
        throw DegenerateProbe("reciprocal of squared probe image is not finite", k);
    const double vsum = sum(v);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = (1.0 - omega) * v[i] / vsum + omega * w[i] / wsum;
}

inline std::vector<double> inv_sqrt(std::span<const double> v)
{
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = 1.0 / std::sqrt(v[i]);
    return out;
}

/// Shared snbin loop. `rho` and `gamma` hold reciprocal squared scalings in
/// the stable form and squared scalings in the test-bench form.
inline DiagonalScaling snbin_impl(const LinearOperator& a, std::size_t nmv, ProbeSource probes,
                                  SnbinUpdate update, const ScalingObserver& observer)
{
    const OmegaSchedule omega(nmv);
    const std::size_t m = a.nrows(), n = a.ncols();
    std::vector<double> rho(m, 1.0), gamma(n, 1.0);
    std::vector<double> u(n), v(m), s_col(n), s_row(m), y(m), z(n);
    const bool stable = update == SnbinUpdate::combine_then_invert;

    auto scaling = [&] {
        if (stable)
            return DiagonalScaling(inv_sqrt(rho), inv_sqrt(gamma));
        std::vector<double> l(m), r(n);
        std::transform(rho.begin(), rho.end(), l.begin(), [](double e) { return std::sqrt(e); });
        std::transform(gamma.begin(), gamma.end(), r.begin(), [](double e) { return std::sqrt(e); });
        return DiagonalScaling(std::move(l), std::move(r));
    };

    for (std::size_t k = 1; k <= nmv; ++k) {
        const double w = omega(k);

        probes.draw(u);
        for (std::size_t j = 0; j < n; ++j)
            s_col[j] = stable ? u[j] / std::sqrt(gamma[j]) : u[j] * std::sqrt(gamma[j]);
        a.apply(s_col, y);
        if (stable)
            blend_squared(rho, y, w, k);
        else
            blend_reciprocal_squared(rho, y, w, k);

        probes.draw(v);
        for (std::size_t i = 0; i < m; ++i)
            s_row[i] = stable ? v[i] / std::sqrt(rho[i]) : v[i] * std::sqrt(rho[i]);
        a.apply_transpose(s_row, z);
        if (stable)
            blend_squared(gamma, z, w, k);
        else
            blend_reciprocal_squared(gamma, z, w, k);

        if (observer)
            observer(k, scaling());
    }
    return scaling();
}

} // namespace detail

/**
 * Matrix-free approximate 2-norm equilibration of a (generally nonsymmetric)
 * operator.
 *
 * Runs exactly nmv iterations, each with one apply and one apply_transpose.
 * The squared image of a Gaussian probe scaled by the current column scaling
 * is an unbiased estimate of B c with B = A o A; it is blended into the
 * reciprocal row scaling with weight omega(k), and symmetrically for the
 * columns. Returns left = rho^{-1/2}, right = gamma^{-1/2}.
 */
inline DiagonalScaling snbin(const LinearOperator& a, std::size_t nmv, ProbeSource probes,
                             const ScalingObserver& observer = {})
{
    return detail::snbin_impl(a, nmv, std::move(probes), detail::SnbinUpdate::combine_then_invert,
                              observer);
}

/**
 * Matrix-free approximate 2-norm equilibration of a symmetric operator;
 * returns x such that diag(x) A diag(x) is approximately binormalized.
 *
 * Exactly nmv applies. Two iterates d and dp are kept. For iterations
 * k < min(32, floor(nmv / 2)) the probe is scaled by the adjacent iterate,
 * which converges quickly on irreducible matrices; afterwards d and dp
 * alternate, which also handles reducible ones. The result is
 * x = (d .* dp)^{-1/4}.
 */
inline std::vector<double> ssbin(const LinearOperator& a, std::size_t nmv, ProbeSource probes,
                                 SsbinMode mode = SsbinMode::nominal,
                                 const ScalingObserver& observer = {})
{
    if (!a.is_square())
        throw DimensionMismatch("ssbin: operator must be square");
    const OmegaSchedule omega(nmv);
    const std::size_t n = a.nrows();
    const std::size_t adjacent_until = std::min<std::size_t>(32, nmv / 2);

    std::vector<double> d(n, 1.0), dp(n, 1.0), u(n), s(n), y(n);
    auto current_x = [&] {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = 1.0 / std::pow(d[i] * dp[i], 0.25);
        return x;
    };

    for (std::size_t k = 1; k <= nmv; ++k) {
        probes.draw(u);
        for (std::size_t i = 0; i < n; ++i)
            s[i] = u[i] / std::sqrt(dp[i]);
        a.apply(s, y);
        detail::blend_squared(d, y, omega(k), k);
        if (mode == SsbinMode::no_switch || k < adjacent_until)
            dp = d;
        else
            std::swap(d, dp);

        if (observer)
            observer(k, DiagonalScaling::symmetric(current_x()));
    }
    return current_x();
}

/// Symmetric scaling sqrt(left .* right) from a nonsymmetric scaling.
inline std::vector<double> symmetrize(const DiagonalScaling& s)
{
    if (s.left().size() != s.right().size())
        throw DimensionMismatch("symmetrize: scaling is not square");
    std::vector<double> x(s.left().size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::sqrt(s.left()[i] * s.right()[i]);
    return x;
}

/**
 * Sample mean of (A diag(x)^{1/2} u)^2 over `nsamples` Gaussian probes, an
 * unbiased estimate of (A o A) x.
 */
inline std::vector<double> estimate_bx(const LinearOperator& a, std::span<const double> x,
                                       ProbeSource& probes, std::size_t nsamples)
{
    if (x.size() != a.ncols())
        throw DimensionMismatch("estimate_bx: x has wrong size");
    if (nsamples == 0)
        throw std::invalid_argument("estimate_bx: nsamples must be positive");
    for (double e : x)
        if (!(e > 0.0) || !std::isfinite(e))
            throw std::invalid_argument("estimate_bx: x must be positive");

    std::vector<double> sqrt_x(x.size()), u(x.size()), s(x.size()), y(a.nrows());
    std::transform(x.begin(), x.end(), sqrt_x.begin(), [](double e) { return std::sqrt(e); });
    std::vector<double> mean(a.nrows(), 0.0);
    for (std::size_t t = 0; t < nsamples; ++t) {
        probes.draw(u);
        for (std::size_t j = 0; j < u.size(); ++j)
            s[j] = sqrt_x[j] * u[j];
        a.apply(s, y);
        for (std::size_t i = 0; i < y.size(); ++i)
            mean[i] += y[i] * y[i];
    }
    for (double& e : mean)
        e /= static_cast<double>(nsamples);
    return mean;
}

} // namespace equil

#endif // EQUIL_STOCHASTIC_HPP_
