// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

// Batch driver for the equilibration library.
//
//   equilibrate run --config <file> --out <path> --format csv|json
//   equilibrate history --matrix <path> --alg ssbin --nmv 100 --seeds 10
//   equilibrate gen --spec <file> --out-dir <dir>
//   equilibrate check --matrix <path>
//
// Exit status: 0 on success, 1 if any matrix failed, 2 on a usage or
// configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <equil/equil.hpp>

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;

int cmd_run(const std::string& config_path, const std::string& out, const std::string& format)
{
    equil::ExperimentConfig cfg;
    try {
        cfg = equil::read_experiment_config(config_path);
    } catch (const equil::Error& e) {
        std::cerr << "equilibrate: " << e.what() << "\n";
        return exit_config;
    }
    if (!out.empty())
        cfg.output_path = out;
    if (!format.empty())
        cfg.format = format == "json" ? equil::ReportFormat::json : equil::ReportFormat::csv;

    const auto reports = equil::run_experiment(cfg);
    try {
        if (cfg.output_path.empty() || cfg.output_path == "-")
            equil::write_report(std::cout, reports, cfg.format);
        else
            equil::write_report(reports, cfg.format, cfg.output_path);
    } catch (const equil::Error& e) {
        std::cerr << "equilibrate: " << e.what() << "\n";
        return exit_failure;
    }
    for (const auto& r : reports)
        if (r.status != "ok")
            std::cerr << "equilibrate: " << r.matrix_name << " / " << r.algorithm << " nmv="
                      << r.nmv << " seed=" << r.seed << ": " << r.status << "\n";
    return equil::all_ok(reports) ? exit_ok : exit_failure;
}

int cmd_history(const std::string& matrix, const std::string& alg_name, std::size_t nmv,
                std::size_t seeds, std::uint64_t seed_base, const std::string& out)
{
    const auto alg = equil::parse_algorithm(alg_name);
    if (!alg) {
        std::cerr << "equilibrate: unknown algorithm '" << alg_name << "'\n";
        return exit_config;
    }
    try {
        const auto a = equil::read_matrix_market(matrix);
        const auto series = equil::emit_history(a, *alg, nmv, seeds, seed_base);
        if (out.empty() || out == "-") {
            equil::write_history_csv(std::cout, series);
        } else {
            std::ofstream f(out);
            if (!f)
                throw equil::Error("cannot open '" + out + "' for writing");
            equil::write_history_csv(f, series);
        }
    } catch (const std::exception& e) {
        std::cerr << "equilibrate: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_ok;
}

int cmd_gen(const std::string& spec_path, const std::string& out_dir)
{
    std::vector<equil::CorpusSpec> specs;
    try {
        specs = equil::read_corpus_specs(spec_path);
    } catch (const equil::Error& e) {
        std::cerr << "equilibrate: " << e.what() << "\n";
        return exit_config;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    int status = exit_ok;
    for (const auto& spec : specs) {
        const auto path = (std::filesystem::path(out_dir) / (spec.effective_name() + ".mtx")).string();
        try {
            equil::write_matrix_market(path, equil::generate(spec));
            std::cout << path << "\n";
        } catch (const std::exception& e) {
            std::cerr << "equilibrate: " << spec.effective_name() << ": " << e.what() << "\n";
            status = exit_failure;
        }
    }
    return status;
}

int cmd_check(const std::string& matrix)
{
    try {
        const auto a = equil::read_matrix_market(matrix);
        std::cout << "matrix: " << matrix << "\n"
                  << "size: " << a.nrows() << " x " << a.ncols() << "\n"
                  << "nnz: " << a.nnz() << "\n"
                  << "symmetric: " << (a.is_symmetric() ? "yes" : "no") << "\n";
        if (!a.is_square()) {
            std::cout << "structure: not square\n";
            return exit_failure;
        }
        const auto r = equil::structure_report(a);
        std::cout << "has_support: " << (r.has_support ? "yes" : "no") << "\n"
                  << "has_total_support: " << (r.has_total_support ? "yes" : "no") << "\n"
                  << "is_irreducible: " << (r.is_irreducible ? "yes" : "no") << "\n";
    } catch (const std::exception& e) {
        std::cerr << "equilibrate: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Matrix equilibration experiments"};
    app.require_subcommand(1);

    std::string config, out, format;
    auto* run = app.add_subcommand("run", "Run a batch experiment");
    run->add_option("--config", config, "Experiment config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Report path ('-' for stdout)");
    run->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    std::string matrix, alg = "ssbin", hist_out;
    std::size_t nmv = 100, seeds = 10;
    std::uint64_t seed_base = 1;
    auto* history = app.add_subcommand("history", "Emit per-iteration log10 ratio series");
    history->add_option("--matrix", matrix, "Matrix Market file")->required();
    history->add_option("--alg", alg, "Algorithm")->capture_default_str();
    history->add_option("--nmv", nmv, "Iterations (matrix-vector product budget)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    history->add_option("--seeds", seeds, "Number of seeds")->capture_default_str()->check(CLI::PositiveNumber);
    history->add_option("--seed-base", seed_base, "First seed")->capture_default_str();
    history->add_option("--out", hist_out, "Output CSV ('-' for stdout)");

    std::string spec, out_dir;
    auto* gen = app.add_subcommand("gen", "Generate corpus matrices");
    gen->add_option("--spec", spec, "Corpus spec file")->required();
    gen->add_option("--out-dir", out_dir, "Output directory")->required();

    std::string check_matrix;
    auto* check = app.add_subcommand("check", "Report structural scalability predicates");
    check->add_option("--matrix", check_matrix, "Matrix Market file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    if (*run)
        return cmd_run(config, out, format);
    if (*history)
        return cmd_history(matrix, alg, nmv, seeds, seed_base, hist_out);
    if (*gen)
        return cmd_gen(spec, out_dir);
    return cmd_check(check_matrix);
}
