// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_CORPUS_HPP_
#define EQUIL_CORPUS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "error.hpp"
#include "io.hpp"
#include "random.hpp"
#include "sparse_matrix.hpp"
#include "structure.hpp"

namespace equil
{

enum class Family
{
    spd,
    symmetric_indefinite,
    nonsymmetric_general,
    reducible_blocks,
    permutation_plus_noise,
};

inline std::string to_string(Family f)
{
    switch (f) {
    case Family::spd: return "spd";
    case Family::symmetric_indefinite: return "symmetric_indefinite";
    case Family::nonsymmetric_general: return "nonsymmetric_general";
    case Family::reducible_blocks: return "reducible_blocks";
    case Family::permutation_plus_noise: return "permutation_plus_noise";
    }
    return "unknown";
}

inline std::optional<Family> parse_family(const std::string& s)
{
    for (Family f : {Family::spd, Family::symmetric_indefinite, Family::nonsymmetric_general,
                     Family::reducible_blocks, Family::permutation_plus_noise})
        if (to_string(f) == s)
            return f;
    return std::nullopt;
}

/**
 * Recipe for one generated test matrix.
 *
 * `cond_target` controls how badly the rows and columns are scaled: the base
 * matrix is multiplied on each side by diag(10^t) with t uniform on
 * [-h, h], h = log10(cond_target) / 4, so that the scaling alone can raise
 * the condition number by up to cond_target. Without it the base matrix is
 * returned as is.
 */
struct CorpusSpec
{
    std::string name;
    Family family = Family::spd;
    std::size_t n = 0;
    /// Probability of each off-diagonal entry; default min(1, 8 / n).
    std::optional<double> density;
    std::optional<double> cond_target;
    std::uint64_t seed = 1;
    /// Block sizes for reducible_blocks; default two halves.
    std::vector<std::size_t> blocks;

    double effective_density() const
    {
        return density.value_or(std::min(1.0, 8.0 / static_cast<double>(std::max<std::size_t>(n, 1))));
    }

    std::string effective_name() const
    {
        if (!name.empty())
            return name;
        return to_string(family) + "_n" + std::to_string(n) + "_s" + std::to_string(seed);
    }

    friend bool operator==(const CorpusSpec&, const CorpusSpec&) = default;
};

namespace detail
{

inline constexpr int generation_attempts = 16;

inline void validate(const CorpusSpec& spec)
{
    if (spec.n == 0)
        throw ConfigError("corpus spec: n must be positive");
    const double d = spec.effective_density();
    if (!(d > 0.0 && d <= 1.0))
        throw ConfigError("corpus spec: density must be in (0, 1]");
    if (spec.cond_target && !(*spec.cond_target >= 1.0))
        throw ConfigError("corpus spec: cond must be at least 1");
    if (spec.family == Family::reducible_blocks && !spec.blocks.empty()) {
        if (spec.blocks.size() < 2)
            throw ConfigError("corpus spec: reducible_blocks needs at least two blocks");
        if (std::accumulate(spec.blocks.begin(), spec.blocks.end(), std::size_t{0}) != spec.n)
            throw ConfigError("corpus spec: block sizes must sum to n");
        if (std::find(spec.blocks.begin(), spec.blocks.end(), 0) != spec.blocks.end())
            throw ConfigError("corpus spec: block sizes must be positive");
    }
    if (spec.family == Family::reducible_blocks && spec.blocks.empty() && spec.n < 2)
        throw ConfigError("corpus spec: reducible_blocks needs n >= 2");
}

inline std::vector<std::size_t> random_permutation(RandomStream& rng, std::size_t n)
{
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i)
        std::swap(p[i - 1], p[rng.below(i)]);
    return p;
}

/// Nonzero normal deviate with |x| >= floor.
inline double normal_away_from_zero(RandomStream& rng, double floor)
{
    double v;
    do {
        v = rng.normal();
    } while (std::abs(v) < floor);
    return v;
}

/// Symmetric off-diagonal pattern on [offset, offset + n), each pair kept with
/// probability `density`, values standard normal.
inline void add_symmetric_offdiagonal(RandomStream& rng, std::vector<Triplet>& t, std::size_t offset,
                                      std::size_t n, double density)
{
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < density) {
                const double v = rng.normal();
                t.push_back({offset + i, offset + j, v});
                t.push_back({offset + j, offset + i, v});
            }
}

inline std::vector<double> log_uniform_scales(RandomStream& rng, std::size_t n,
                                              std::optional<double> cond_target)
{
    std::vector<double> d(n, 1.0);
    if (!cond_target)
        return d;
    const double h = std::log10(*cond_target) / 4.0;
    for (double& e : d)
        e = std::pow(10.0, h * (2.0 * rng.uniform() - 1.0));
    return d;
}

inline bool cholesky_certifies_spd(const SparseMatrix& m)
{
    std::vector<Eigen::Triplet<double>> et;
    for (const Triplet& t : m.triplets())
        et.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
    Eigen::SparseMatrix<double> em(static_cast<int>(m.nrows()), static_cast<int>(m.ncols()));
    em.setFromTriplets(et.begin(), et.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(em);
    // Factorization fails on the first non-positive pivot.
    return llt.info() == Eigen::Success;
}

inline SparseMatrix generate_once(const CorpusSpec& spec, RandomStream& rng)
{
    const std::size_t n = spec.n;
    const double density = spec.effective_density();
    std::vector<Triplet> t;

    switch (spec.family) {
    case Family::spd: {
        add_symmetric_offdiagonal(rng, t, 0, n, density);
        std::vector<double> offsum(n, 0.0);
        for (const Triplet& e : t)
            offsum[e.row] += std::abs(e.value);
        // Strict diagonal dominance with a positive diagonal.
        for (std::size_t i = 0; i < n; ++i)
            t.push_back({i, i, offsum[i] + 0.1 + rng.uniform()});
        const auto d = log_uniform_scales(rng, n, spec.cond_target);
        return scale(SparseMatrix(n, n, std::move(t)), DiagonalScaling::symmetric(d));
    }
    case Family::symmetric_indefinite: {
        add_symmetric_offdiagonal(rng, t, 0, n, density);
        for (std::size_t i = 0; i < n; ++i)
            if (rng.uniform() >= 0.2)
                t.push_back({i, i, rng.normal()});
        const auto d = log_uniform_scales(rng, n, spec.cond_target);
        return scale(SparseMatrix(n, n, std::move(t)), DiagonalScaling::symmetric(d));
    }
    case Family::nonsymmetric_general:
    case Family::permutation_plus_noise: {
        const bool noise = spec.family == Family::permutation_plus_noise;
        const auto p = random_permutation(rng, n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = noise ? (rng.uniform() < 0.5 ? -1.0 : 1.0) * (1.0 + 9.0 * rng.uniform())
                                   : rng.normal();
            t.push_back({i, p[i], v});
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (j != p[i] && rng.uniform() < density)
                    t.push_back({i, j, noise ? 1e-3 * rng.normal() : rng.normal()});
        const auto dl = log_uniform_scales(rng, n, spec.cond_target);
        const auto dr = log_uniform_scales(rng, n, spec.cond_target);
        return scale(SparseMatrix(n, n, std::move(t)), DiagonalScaling(dl, dr));
    }
    case Family::reducible_blocks: {
        std::vector<std::size_t> blocks = spec.blocks;
        if (blocks.empty())
            blocks = {n / 2, n - n / 2};
        std::size_t offset = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const std::size_t size = blocks[b];
            const double block_scale = std::pow(10.0, static_cast<double>(b % 4));
            std::vector<Triplet> bt;
            add_symmetric_offdiagonal(rng, bt, offset, size, density);
            // A path keeps each block irreducible.
            for (std::size_t i = 0; i + 1 < size; ++i) {
                const double v = normal_away_from_zero(rng, 0.1);
                bt.push_back({offset + i, offset + i + 1, v});
                bt.push_back({offset + i + 1, offset + i, v});
            }
            for (std::size_t i = 0; i < size; ++i)
                bt.push_back({offset + i, offset + i, normal_away_from_zero(rng, 0.1)});
            for (Triplet& e : bt)
                e.value *= block_scale;
            t.insert(t.end(), bt.begin(), bt.end());
            offset += size;
        }
        const auto d = log_uniform_scales(rng, n, spec.cond_target);
        return scale(SparseMatrix(n, n, std::move(t)), DiagonalScaling::symmetric(d));
    }
    }
    throw std::logic_error("generate: unhandled family");
}

} // namespace detail

/**
 * Generates the matrix described by `spec`; the same spec always yields the
 * same matrix.
 *
 * Every family is pruned to total support (entries on no perfect matching are
 * dropped, which keeps symmetric patterns symmetric). The spd family is
 * certified by a sparse Cholesky factorization, reducible_blocks is checked
 * to be reducible. Failed draws are retried from the continuing random
 * stream; GenerationFailed is thrown after a bounded number of attempts.
 */
inline SparseMatrix generate(const CorpusSpec& spec)
{
    detail::validate(spec);
    RandomStream rng(spec.seed);
    for (int attempt = 0; attempt < detail::generation_attempts; ++attempt) {
        SparseMatrix raw = detail::generate_once(spec, rng);
        if (raw.nnz() == 0)
            continue;
        std::optional<SparseMatrix> m = prune_to_total_support(raw);
        if (!m)
            continue;
        if (spec.family == Family::spd && !detail::cholesky_certifies_spd(*m))
            continue;
        if (spec.family == Family::reducible_blocks && is_irreducible(*m))
            continue;
        return std::move(*m);
    }
    throw GenerationFailed("could not generate '" + spec.effective_name() + "' after "
                           + std::to_string(detail::generation_attempts) + " attempts");
}

/// Parses one `key=value ...` spec line (keys: name, family, n, density,
/// cond, seed, blocks).
inline CorpusSpec parse_corpus_spec(const std::string& line)
{
    CorpusSpec spec;
    bool has_family = false;
    std::istringstream ss(line);
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("corpus spec: expected key=value, got '" + token + "'");
        const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
        try {
            if (key == "name")
                spec.name = value;
            else if (key == "family") {
                auto f = parse_family(value);
                if (!f)
                    throw ConfigError("corpus spec: unknown family '" + value + "'");
                spec.family = *f;
                has_family = true;
            } else if (key == "n")
                spec.n = std::stoul(value);
            else if (key == "density")
                spec.density = std::stod(value);
            else if (key == "cond" || key == "cond_target")
                spec.cond_target = std::stod(value);
            else if (key == "seed")
                spec.seed = std::stoull(value);
            else if (key == "blocks") {
                std::istringstream bs(value);
                std::string part;
                while (std::getline(bs, part, ','))
                    spec.blocks.push_back(std::stoul(part));
            } else
                throw ConfigError("corpus spec: unknown key '" + key + "'");
        } catch (const std::logic_error&) {
            throw ConfigError("corpus spec: bad value for '" + key + "': '" + value + "'");
        }
    }
    if (!has_family)
        throw ConfigError("corpus spec: missing family");
    if (spec.n == 0 && !spec.blocks.empty())
        spec.n = std::accumulate(spec.blocks.begin(), spec.blocks.end(), std::size_t{0});
    detail::validate(spec);
    return spec;
}

/// One spec per non-blank line; '#' starts a comment.
inline std::vector<CorpusSpec> parse_corpus_specs(std::istream& in)
{
    std::vector<CorpusSpec> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            out.push_back(parse_corpus_spec(line));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<CorpusSpec> read_corpus_specs(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open corpus spec file '" + path + "'");
    return parse_corpus_specs(in);
}

inline std::string format_corpus_spec(const CorpusSpec& spec)
{
    std::ostringstream os;
    os << "name=" << spec.effective_name() << " family=" << to_string(spec.family)
       << " n=" << spec.n;
    if (spec.density)
        os << " density=" << detail::format_double(*spec.density);
    if (spec.cond_target)
        os << " cond=" << detail::format_double(*spec.cond_target);
    os << " seed=" << spec.seed;
    if (!spec.blocks.empty()) {
        os << " blocks=";
        for (std::size_t i = 0; i < spec.blocks.size(); ++i)
            os << (i ? "," : "") << spec.blocks[i];
    }
    return os.str();
}

namespace detail
{

/// Twenty sizes spaced geometrically over [100, 2000].
inline std::size_t desk_size(std::size_t i)
{
    return static_cast<std::size_t>(std::lround(100.0 * std::pow(20.0, static_cast<double>(i) / 19.0)));
}

inline double desk_cond(std::size_t i)
{
    static constexpr double conds[] = {1e2, 1e4, 1e6, 1e8, 1e10};
    return conds[i % 5];
}

} // namespace detail

/// Twenty symmetric matrices: spd, indefinite and reducible, n in [100, 2000].
inline std::vector<CorpusSpec> desk_corpus_symmetric()
{
    std::vector<CorpusSpec> out;
    for (std::size_t i = 0; i < 20; ++i) {
        CorpusSpec s;
        s.family = i % 7 == 3 ? Family::reducible_blocks
                   : i % 2 == 0 ? Family::spd
                                : Family::symmetric_indefinite;
        s.n = detail::desk_size(i);
        s.cond_target = detail::desk_cond(i);
        s.seed = 1000 + i;
        s.name = "sym" + std::to_string(i) + "_" + to_string(s.family);
        out.push_back(std::move(s));
    }
    return out;
}

/// Twenty nonsymmetric matrices, n in [100, 2000].
inline std::vector<CorpusSpec> desk_corpus_nonsymmetric()
{
    std::vector<CorpusSpec> out;
    for (std::size_t i = 0; i < 20; ++i) {
        CorpusSpec s;
        s.family = i % 4 == 1 ? Family::permutation_plus_noise : Family::nonsymmetric_general;
        s.n = detail::desk_size(i);
        s.cond_target = detail::desk_cond(i);
        s.seed = 2000 + i;
        s.name = "nonsym" + std::to_string(i) + "_" + to_string(s.family);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace equil

#endif // EQUIL_CORPUS_HPP_
