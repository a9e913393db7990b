// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_ALGORITHMS_HPP_
#define EQUIL_ALGORITHMS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "exact.hpp"
#include "operator.hpp"
#include "random.hpp"
#include "sparse_matrix.hpp"
#include "stochastic.hpp"

namespace equil
{

/// Every scaling algorithm reachable by name from the batch driver.
enum class Algorithm
{
    snbin,
    ssbin,
    sk_exact,
    sym_sk_exact,
    jacobi,
    inf_norm,
    /// ssbin without the switch to alternating iterates.
    ssbin_no_switch,
    /// snbin on a symmetric matrix, symmetrized as sqrt(left .* right).
    snbin_symmetric,
};

inline constexpr std::array<std::pair<Algorithm, std::string_view>, 8> algorithm_names{{
    {Algorithm::snbin, "snbin"},
    {Algorithm::ssbin, "ssbin"},
    {Algorithm::sk_exact, "sk_exact"},
    {Algorithm::sym_sk_exact, "sym_sk_exact"},
    {Algorithm::jacobi, "jacobi"},
    {Algorithm::inf_norm, "inf_norm"},
    {Algorithm::ssbin_no_switch, "ssbin_no_switch"},
    {Algorithm::snbin_symmetric, "snbin_symmetric"},
}};

inline std::string_view to_string(Algorithm a)
{
    for (const auto& [alg, name] : algorithm_names)
        if (alg == a)
            return name;
    return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name)
{
    for (const auto& [alg, name_] : algorithm_names)
        if (name_ == name)
            return alg;
    return std::nullopt;
}

inline bool is_stochastic(Algorithm a)
{
    return a == Algorithm::snbin || a == Algorithm::ssbin || a == Algorithm::ssbin_no_switch
           || a == Algorithm::snbin_symmetric;
}

inline bool requires_symmetric(Algorithm a)
{
    return a == Algorithm::ssbin || a == Algorithm::sym_sk_exact || a == Algorithm::jacobi
           || a == Algorithm::ssbin_no_switch || a == Algorithm::snbin_symmetric;
}

struct ScalingRun
{
    DiagonalScaling scaling;
    /// Always true for the stochastic and one-pass algorithms.
    bool converged = true;
};

/**
 * Runs `alg` on `a`. Stochastic algorithms see `a` only through a matrix-free
 * operator and use `nmv` and `seed`; the exact ones ignore both.
 */
inline ScalingRun compute_scaling(const SparseMatrix& a, Algorithm alg, std::size_t nmv,
                                  std::uint64_t seed, const ExactOptions& exact_opts = {},
                                  const ScalingObserver& observer = {})
{
    if (requires_symmetric(alg) && !a.is_symmetric())
        throw std::invalid_argument(std::string(to_string(alg)) + " requires a symmetric matrix");

    switch (alg) {
    case Algorithm::snbin:
        return {snbin(from_sparse(a), nmv, ProbeSource(seed), observer)};
    case Algorithm::ssbin:
    case Algorithm::ssbin_no_switch: {
        const auto mode = alg == Algorithm::ssbin ? SsbinMode::nominal : SsbinMode::no_switch;
        return {DiagonalScaling::symmetric(ssbin(from_sparse(a), nmv, ProbeSource(seed), mode,
                                                 observer))};
    }
    case Algorithm::snbin_symmetric: {
        ScalingObserver sym_observer;
        if (observer)
            sym_observer = [&](std::size_t k, const DiagonalScaling& s) {
                observer(k, DiagonalScaling::symmetric(symmetrize(s)));
            };
        return {DiagonalScaling::symmetric(
            symmetrize(snbin(from_sparse(a), nmv, ProbeSource(seed), sym_observer)))};
    }
    case Algorithm::sk_exact: {
        ExactResult r = equilibrate_2norm(a, exact_opts, SymmetryMode::force_nonsymmetric, observer);
        return {std::move(r.scaling), r.converged};
    }
    case Algorithm::sym_sk_exact: {
        ExactResult r = equilibrate_2norm(a, exact_opts, SymmetryMode::automatic, observer);
        return {std::move(r.scaling), r.converged};
    }
    case Algorithm::jacobi: {
        auto s = jacobi_scale(a).first;
        if (observer)
            observer(1, s);
        return {std::move(s)};
    }
    case Algorithm::inf_norm: {
        auto s = inf_norm_scale(a);
        if (observer)
            observer(1, s);
        return {std::move(s)};
    }
    }
    throw std::logic_error("compute_scaling: unhandled algorithm");
}

} // namespace equil

#endif // EQUIL_ALGORITHMS_HPP_
