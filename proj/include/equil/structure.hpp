// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_STRUCTURE_HPP_
#define EQUIL_STRUCTURE_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "sparse_matrix.hpp"

namespace equil
{

/// Scalability predicates on the nonzero pattern of a square matrix.
struct StructureReport
{
    bool has_support = false;
    bool has_total_support = false;
    bool is_irreducible = false;
};

namespace detail
{

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

inline void require_square(const SparseMatrix& m, const char* who)
{
    if (!m.is_square())
        throw DimensionMismatch(std::string(who) + ": matrix must be square");
}

/// Hopcroft-Karp maximum bipartite matching between rows and columns of the
/// pattern. Returns the column matched to each row (npos if unmatched).
inline std::vector<std::size_t> maximum_matching(const SparseMatrix& m)
{
    const std::size_t nr = m.nrows(), nc = m.ncols();
    const auto ptr = m.row_ptr();
    const auto adj = m.col_idx();
    constexpr std::size_t inf = npos;

    std::vector<std::size_t> match_row(nr, npos), match_col(nc, npos);
    std::vector<std::size_t> dist(nr), it(nr), stack;
    std::vector<std::size_t> queue;

    // Cheap greedy start.
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k)
            if (match_col[adj[k]] == npos) {
                match_col[adj[k]] = i;
                match_row[i] = adj[k];
                break;
            }

    auto bfs = [&] {
        queue.clear();
        for (std::size_t i = 0; i < nr; ++i) {
            dist[i] = match_row[i] == npos ? 0 : inf;
            if (dist[i] == 0)
                queue.push_back(i);
        }
        bool found = false;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const std::size_t u = queue[q];
            for (std::size_t k = ptr[u]; k < ptr[u + 1]; ++k) {
                const std::size_t w = match_col[adj[k]];
                if (w == npos)
                    found = true;
                else if (dist[w] == inf) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        return found;
    };

    auto augment = [&](std::size_t root) {
        stack.assign(1, root);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            if (it[u] == ptr[u + 1]) {
                dist[u] = inf;
                stack.pop_back();
                continue;
            }
            const std::size_t w = match_col[adj[it[u]]];
            if (w == npos) {
                for (std::size_t r : stack) {
                    const std::size_t c = adj[it[r]];
                    match_col[c] = r;
                    match_row[r] = c;
                }
                return true;
            }
            if (dist[w] != inf && dist[w] == dist[u] + 1)
                stack.push_back(w);
            else
                ++it[u];
        }
        return false;
    };

    while (bfs()) {
        for (std::size_t i = 0; i < nr; ++i)
            it[i] = ptr[i];
        for (std::size_t i = 0; i < nr; ++i)
            if (match_row[i] == npos)
                augment(i);
    }
    return match_row;
}

/// Strongly connected components (iterative Tarjan) of a digraph in
/// adjacency-list form. Returns a component label per vertex.
inline std::vector<std::size_t> strong_components(const std::vector<std::vector<std::size_t>>& g,
                                                  std::size_t* count = nullptr)
{
    const std::size_t n = g.size();
    std::vector<std::size_t> index(n, npos), low(n, 0), label(n, npos), edge(n, 0);
    std::vector<std::size_t> tarjan_stack, call_stack;
    std::vector<bool> on_stack(n, false);
    std::size_t next_index = 0, ncomp = 0;

    for (std::size_t s = 0; s < n; ++s) {
        if (index[s] != npos)
            continue;
        call_stack.push_back(s);
        index[s] = low[s] = next_index++;
        tarjan_stack.push_back(s);
        on_stack[s] = true;
        while (!call_stack.empty()) {
            const std::size_t v = call_stack.back();
            if (edge[v] < g[v].size()) {
                const std::size_t w = g[v][edge[v]++];
                if (index[w] == npos) {
                    index[w] = low[w] = next_index++;
                    tarjan_stack.push_back(w);
                    on_stack[w] = true;
                    call_stack.push_back(w);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            call_stack.pop_back();
            if (!call_stack.empty())
                low[call_stack.back()] = std::min(low[call_stack.back()], low[v]);
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = tarjan_stack.back();
                    tarjan_stack.pop_back();
                    on_stack[w] = false;
                    label[w] = ncomp;
                } while (w != v);
                ++ncomp;
            }
        }
    }
    if (count)
        *count = ncomp;
    return label;
}

/// For a perfect matching `match_row`, marks each stored entry (in CSR order)
/// that lies on at least one perfect matching of the pattern.
///
/// Entry (i, j) with j matched to row k is on a perfect matching iff it is a
/// matching edge or rows i and k share a strongly connected component of the
/// graph i -> k over entries (i, match(k)).
inline std::vector<bool> entries_on_perfect_matching(const SparseMatrix& m,
                                                     std::span<const std::size_t> match_row)
{
    const std::size_t n = m.nrows();
    std::vector<std::size_t> row_of_col(n, npos);
    for (std::size_t i = 0; i < n; ++i)
        row_of_col[match_row[i]] = i;

    std::vector<std::vector<std::size_t>> g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : m.row_cols(i))
            if (row_of_col[j] != i)
                g[i].push_back(row_of_col[j]);
    const auto label = strong_components(g);

    std::vector<bool> on(m.nnz());
    const auto ptr = m.row_ptr();
    const auto cols = m.col_idx();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k)
            on[k] = label[i] == label[row_of_col[cols[k]]];
    return on;
}

inline std::optional<std::vector<std::size_t>> perfect_matching(const SparseMatrix& m)
{
    auto match = maximum_matching(m);
    if (std::find(match.begin(), match.end(), npos) != match.end())
        return std::nullopt;
    return match;
}

} // namespace detail

/// True iff the pattern admits a perfect row-column matching (structural
/// nonsingularity).
inline bool has_support(const SparseMatrix& m)
{
    detail::require_square(m, "has_support");
    return detail::perfect_matching(m).has_value();
}

/// True iff every stored entry lies on some perfect matching.
inline bool has_total_support(const SparseMatrix& m)
{
    detail::require_square(m, "has_total_support");
    const auto match = detail::perfect_matching(m);
    if (!match)
        return false;
    const auto on = detail::entries_on_perfect_matching(m, *match);
    return std::all_of(on.begin(), on.end(), [](bool b) { return b; });
}

/// True iff the directed graph of the off-diagonal pattern is strongly
/// connected. A 1x1 matrix is irreducible.
inline bool is_irreducible(const SparseMatrix& m)
{
    detail::require_square(m, "is_irreducible");
    std::vector<std::vector<std::size_t>> g(m.nrows());
    for (std::size_t i = 0; i < m.nrows(); ++i)
        for (std::size_t j : m.row_cols(i))
            if (j != i)
                g[i].push_back(j);
    std::size_t count = 0;
    detail::strong_components(g, &count);
    return count == 1;
}

/// Drops every entry that lies on no perfect matching. The result has total
/// support; returns nullopt when the pattern has no support at all.
inline std::optional<SparseMatrix> prune_to_total_support(const SparseMatrix& m)
{
    detail::require_square(m, "prune_to_total_support");
    const auto match = detail::perfect_matching(m);
    if (!match)
        return std::nullopt;
    const auto on = detail::entries_on_perfect_matching(m, *match);
    std::vector<Triplet> kept;
    const auto all = m.triplets();
    for (std::size_t k = 0; k < all.size(); ++k)
        if (on[k])
            kept.push_back(all[k]);
    return SparseMatrix(m.nrows(), m.ncols(), std::move(kept));
}

inline StructureReport structure_report(const SparseMatrix& m)
{
    StructureReport r;
    r.has_support = has_support(m);
    r.has_total_support = r.has_support && has_total_support(m);
    r.is_irreducible = is_irreducible(m);
    return r;
}

} // namespace equil

#endif // EQUIL_STRUCTURE_HPP_
