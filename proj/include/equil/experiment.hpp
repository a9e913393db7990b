// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_EXPERIMENT_HPP_
#define EQUIL_EXPERIMENT_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <variant>
#include <vector>

#include "algorithms.hpp"
#include "corpus.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "io.hpp"
#include "sparse_matrix.hpp"

namespace equil
{

/// A matrix to run on: a Matrix Market path or a generated corpus spec.
using MatrixInput = std::variant<std::string, CorpusSpec>;

struct ExperimentConfig
{
    std::vector<MatrixInput> inputs;
    std::vector<Algorithm> algorithms;
    std::vector<std::size_t> budgets{32, 64, 128};
    std::size_t seeds_per_run = 5;
    std::uint64_t seed_base = 1;
    std::size_t cond_cap = default_condition_cap;
    /// Worker threads; 0 picks the hardware concurrency.
    std::size_t threads = 0;
    ExactOptions exact{};
    std::string output_path;
    ReportFormat format = ReportFormat::csv;

    void validate() const
    {
        if (inputs.empty())
            throw ConfigError("config: at least one input is required");
        if (algorithms.empty())
            throw ConfigError("config: at least one algorithm is required");
        if (budgets.empty()
            || std::find(budgets.begin(), budgets.end(), 0) != budgets.end())
            throw ConfigError("config: budgets must be positive");
        if (seeds_per_run == 0)
            throw ConfigError("config: seeds must be positive");
        if (!(exact.tol > 0.0) || exact.max_iters == 0)
            throw ConfigError("config: tol and max_iters must be positive");
    }
};

namespace detail
{

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string part;
    std::istringstream ss(s);
    while (std::getline(ss, part, ','))
        if (auto t = trim(part); !t.empty())
            out.push_back(t);
    return out;
}

inline std::string matrix_name(const MatrixInput& in)
{
    if (const auto* path = std::get_if<std::string>(&in))
        return std::filesystem::path(*path).stem().string();
    return std::get<CorpusSpec>(in).effective_name();
}

} // namespace detail

/**
 * Parses a plain-text `key = value` experiment config. Keys:
 *
 *     input = matrix.mtx                  (repeatable)
 *     corpus = family=spd n=200 cond=1e6  (repeatable, one corpus spec)
 *     corpus_file = specs.txt             (repeatable)
 *     algorithms = ssbin, snbin
 *     budgets = 32, 64, 128
 *     seeds = 5
 *     seed_base = 1
 *     cond_cap = 2000
 *     threads = 0
 *     tol = 1e-10
 *     max_iters = 10000
 *     out = report.csv
 *     format = csv | json
 *
 * Relative paths are resolved against `base_dir`.
 */
inline ExperimentConfig parse_experiment_config(std::istream& in,
                                                const std::filesystem::path& base_dir = {})
{
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return (path.is_absolute() || base_dir.empty() ? path : base_dir / path).string();
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (detail::trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            if (key == "input")
                cfg.inputs.emplace_back(resolve(value));
            else if (key == "corpus")
                cfg.inputs.emplace_back(parse_corpus_spec(value));
            else if (key == "corpus_file")
                for (CorpusSpec& s : read_corpus_specs(resolve(value)))
                    cfg.inputs.emplace_back(std::move(s));
            else if (key == "algorithms") {
                cfg.algorithms.clear();
                for (const std::string& name : detail::split_list(value)) {
                    const auto alg = parse_algorithm(name);
                    if (!alg)
                        throw ConfigError("unknown algorithm '" + name + "'");
                    cfg.algorithms.push_back(*alg);
                }
            } else if (key == "budgets") {
                cfg.budgets.clear();
                for (const std::string& b : detail::split_list(value)) {
                    const long long v = std::stoll(b);
                    if (v <= 0)
                        throw ConfigError("budgets must be positive");
                    cfg.budgets.push_back(static_cast<std::size_t>(v));
                }
            } else if (key == "seeds")
                cfg.seeds_per_run = std::stoul(value);
            else if (key == "seed_base")
                cfg.seed_base = std::stoull(value);
            else if (key == "cond_cap")
                cfg.cond_cap = std::stoul(value);
            else if (key == "threads")
                cfg.threads = std::stoul(value);
            else if (key == "tol")
                cfg.exact.tol = std::stod(value);
            else if (key == "max_iters")
                cfg.exact.max_iters = std::stoul(value);
            else if (key == "out")
                cfg.output_path = resolve(value);
            else if (key == "format") {
                if (value == "csv")
                    cfg.format = ReportFormat::csv;
                else if (value == "json")
                    cfg.format = ReportFormat::json;
                else
                    throw ConfigError("format must be csv or json");
            } else
                throw ConfigError("unknown key '" + key + "'");
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::logic_error&) {
            throw ConfigError("config line " + std::to_string(lineno) + ": bad value for '" + key
                              + "'");
        }
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig read_experiment_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    return parse_experiment_config(in, std::filesystem::path(path).parent_path());
}

namespace detail
{

struct PreparedMatrix
{
    std::string name;
    std::optional<SparseMatrix> matrix;
    std::optional<double> ratio_before;
    std::optional<double> cond_before;
    std::string error;
};

inline std::optional<double> safe_condition(const SparseMatrix& m, std::size_t cap)
{
    if (!m.is_square() || m.nrows() > cap)
        return std::nullopt;
    return condition_number(m, cap);
}

inline PreparedMatrix prepare(const MatrixInput& in, std::size_t cond_cap)
{
    PreparedMatrix p;
    p.name = matrix_name(in);
    try {
        if (const auto* path = std::get_if<std::string>(&in))
            p.matrix = read_matrix_market(*path);
        else
            p.matrix = generate(std::get<CorpusSpec>(in));
        p.ratio_before = ratio(*p.matrix).value;
        p.cond_before = safe_condition(*p.matrix, cond_cap);
    } catch (const std::exception& e) {
        p.error = e.what();
    }
    return p;
}

/// Runs `body(i)` for i in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                body(i);
        });
}

struct Job
{
    std::size_t matrix;
    Algorithm algorithm;
    std::size_t nmv;
    std::uint64_t seed;
};

struct JobResult
{
    std::optional<double> ratio_after;
    std::optional<double> cond_after;
    double wall_time = 0.0;
    std::string status = "ok";
};

} // namespace detail

/**
 * Runs every applicable (matrix, algorithm, budget, seed) cell. Algorithms
 * that need a symmetric matrix are skipped for nonsymmetric inputs. Exact
 * algorithms ignore budget and seed; they run once per matrix and their
 * result is repeated in every cell. Failures are recorded in the status
 * column. Rows are sorted by (matrix_name, algorithm, nmv, seed).
 */
inline std::vector<RunReport> run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<detail::PreparedMatrix> mats(cfg.inputs.size());
    detail::parallel_for(mats.size(), cfg.threads,
                         [&](std::size_t i) { mats[i] = detail::prepare(cfg.inputs[i], cfg.cond_cap); });

    std::vector<detail::Job> jobs;
    for (std::size_t mi = 0; mi < mats.size(); ++mi) {
        if (!mats[mi].matrix)
            continue;
        const bool symmetric = mats[mi].matrix->is_symmetric();
        for (Algorithm alg : cfg.algorithms) {
            if (requires_symmetric(alg) && !symmetric)
                continue;
            if (is_stochastic(alg))
                for (std::size_t nmv : cfg.budgets)
                    for (std::size_t s = 0; s < cfg.seeds_per_run; ++s)
                        jobs.push_back({mi, alg, nmv, cfg.seed_base + s});
            else
                jobs.push_back({mi, alg, 0, 0});
        }
    }

    std::vector<detail::JobResult> results(jobs.size());
    detail::parallel_for(jobs.size(), cfg.threads, [&](std::size_t j) {
        const detail::Job& job = jobs[j];
        const SparseMatrix& a = *mats[job.matrix].matrix;
        detail::JobResult& r = results[j];
        const auto start = std::chrono::steady_clock::now();
        try {
            const ScalingRun run = compute_scaling(a, job.algorithm, job.nmv, job.seed, cfg.exact);
            r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            r.ratio_after = scaled_ratio(a, run.scaling).value;
            r.cond_after = detail::safe_condition(scale(a, run.scaling), cfg.cond_cap);
            if (!run.converged)
                r.status = "not_converged";
        } catch (const std::exception& e) {
            r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            r.status = std::string("error: ") + e.what();
        }
    });

    std::vector<RunReport> reports;
    auto emit = [&](const detail::PreparedMatrix& m, Algorithm alg, std::size_t nmv,
                    std::uint64_t seed, const detail::JobResult* r) {
        RunReport rep;
        rep.matrix_name = m.name;
        rep.algorithm = std::string(to_string(alg));
        rep.seed = seed;
        rep.nmv = nmv;
        rep.ratio_before = m.ratio_before;
        rep.cond_before = m.cond_before;
        if (r) {
            rep.ratio_after = r->ratio_after;
            rep.cond_after = r->cond_after;
            rep.wall_time = r->wall_time;
            rep.status = r->status;
        } else {
            rep.status = "error: " + m.error;
        }
        reports.push_back(std::move(rep));
    };

    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const detail::Job& job = jobs[j];
        if (is_stochastic(job.algorithm)) {
            emit(mats[job.matrix], job.algorithm, job.nmv, job.seed, &results[j]);
            continue;
        }
        for (std::size_t nmv : cfg.budgets)
            for (std::size_t s = 0; s < cfg.seeds_per_run; ++s)
                emit(mats[job.matrix], job.algorithm, nmv, cfg.seed_base + s, &results[j]);
    }
    for (const detail::PreparedMatrix& m : mats) {
        if (m.matrix)
            continue;
        for (Algorithm alg : cfg.algorithms)
            for (std::size_t nmv : cfg.budgets)
                for (std::size_t s = 0; s < cfg.seeds_per_run; ++s)
                    emit(m, alg, nmv, cfg.seed_base + s, nullptr);
    }

    std::stable_sort(reports.begin(), reports.end(), [](const RunReport& a, const RunReport& b) {
        return std::tie(a.matrix_name, a.algorithm, a.nmv, a.seed)
               < std::tie(b.matrix_name, b.algorithm, b.nmv, b.seed);
    });
    return reports;
}

inline bool all_ok(const std::vector<RunReport>& reports)
{
    return std::all_of(reports.begin(), reports.end(),
                       [](const RunReport& r) { return r.status == "ok"; });
}

/// log10 ratio series for one seed; the variant series are filled for ssbin
/// only (snbin symmetrized, and ssbin without the mode switch).
struct HistorySeries
{
    std::uint64_t seed;
    std::vector<double> nominal;
    std::vector<double> snbin;
    std::vector<double> no_switch;
};

inline std::vector<HistorySeries> emit_history(const SparseMatrix& a, Algorithm alg,
                                               std::size_t nmv, std::size_t seeds,
                                               std::uint64_t seed_base = 1,
                                               const ExactOptions& exact = {})
{
    std::vector<HistorySeries> out;
    for (std::size_t s = 0; s < seeds; ++s) {
        HistoryParams p{nmv, seed_base + s, exact};
        HistorySeries h{p.seed, convergence_history(a, alg, p), {}, {}};
        if (alg == Algorithm::ssbin) {
            h.snbin = convergence_history(a, Algorithm::snbin_symmetric, p);
            h.no_switch = convergence_history(a, Algorithm::ssbin_no_switch, p);
        }
        out.push_back(std::move(h));
    }
    return out;
}

/// CSV with columns iteration, seed, log10_ratio, log10_ratio_snbin,
/// log10_ratio_no_switch (the last two empty when not computed).
inline void write_history_csv(std::ostream& out, const std::vector<HistorySeries>& series)
{
    out << "iteration,seed,log10_ratio,log10_ratio_snbin,log10_ratio_no_switch\n";
    auto cell = [](const std::vector<double>& v, std::size_t k) {
        return k < v.size() ? detail::format_double(v[k]) : std::string();
    };
    for (const HistorySeries& h : series) {
        const std::size_t len = std::max({h.nominal.size(), h.snbin.size(), h.no_switch.size()});
        for (std::size_t k = 0; k < len; ++k)
            out << k << "," << h.seed << "," << cell(h.nominal, k) << "," << cell(h.snbin, k)
                << "," << cell(h.no_switch, k) << "\n";
    }
}

} // namespace equil

#endif // EQUIL_EXPERIMENT_HPP_
