// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_IO_HPP_
#define EQUIL_IO_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "sparse_matrix.hpp"

namespace equil
{

namespace detail
{

inline std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline bool blank(const std::string& line)
{
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

} // namespace detail

/**
 * Reads a `%%MatrixMarket matrix coordinate real general|symmetric` file.
 * Symmetric files are expanded to full storage; duplicates are summed.
 */
inline SparseMatrix read_matrix_market(std::istream& in, const std::string& source = "<stream>")
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line))
        throw ParseError(source, 1, "empty input");
    ++lineno;

    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket")
        throw ParseError(source, lineno, "missing %%MatrixMarket banner");
    object = detail::lower(object);
    format = detail::lower(format);
    field = detail::lower(field);
    symmetry = detail::lower(symmetry);
    if (object != "matrix")
        throw UnsupportedFormat(source + ": unsupported object '" + object + "'");
    if (format != "coordinate")
        throw UnsupportedFormat(source + ": unsupported format '" + format
                                + "' (only coordinate)");
    if (field != "real")
        throw UnsupportedFormat(source + ": unsupported field '" + field + "' (only real)");
    if (symmetry != "general" && symmetry != "symmetric")
        throw UnsupportedFormat(source + ": unsupported symmetry '" + symmetry
                                + "' (only general or symmetric)");
    const bool symmetric = symmetry == "symmetric";

    // Skip comments to the size line.
    do {
        if (!std::getline(in, line))
            throw ParseError(source, lineno + 1, "missing size line");
        ++lineno;
    } while (line.empty() || line[0] == '%' || detail::blank(line));

    long long nr = 0, nc = 0, nz = 0;
    {
        std::istringstream ss(line);
        std::string extra;
        if (!(ss >> nr >> nc >> nz) || (ss >> extra))
            throw ParseError(source, lineno, "malformed size line");
    }
    if (nr <= 0 || nc <= 0 || nz < 0)
        throw ParseError(source, lineno, "invalid dimensions");
    if (symmetric && nr != nc)
        throw ParseError(source, lineno, "symmetric matrix must be square");

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(symmetric ? 2 * nz : nz));
    long long read = 0;
    while (read < nz) {
        if (!std::getline(in, line))
            throw ParseError(source, lineno + 1,
                             "expected " + std::to_string(nz) + " entries, found "
                                 + std::to_string(read));
        ++lineno;
        if (detail::blank(line) || line[0] == '%')
            continue;
        std::istringstream ss(line);
        long long i = 0, j = 0;
        double v = 0.0;
        std::string extra;
        if (!(ss >> i >> j >> v) || (ss >> extra))
            throw ParseError(source, lineno, "malformed entry");
        if (i < 1 || i > nr || j < 1 || j > nc)
            throw ParseError(source, lineno, "index out of range");
        const auto r = static_cast<std::size_t>(i - 1), c = static_cast<std::size_t>(j - 1);
        entries.push_back({r, c, v});
        if (symmetric && r != c)
            entries.push_back({c, r, v});
        ++read;
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!detail::blank(line) && line[0] != '%')
            throw ParseError(source, lineno, "more entries than declared");
    }
    return SparseMatrix(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc),
                        std::move(entries));
}

inline SparseMatrix read_matrix_market(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "'");
    return read_matrix_market(in, path);
}

/// Writes the matrix; symmetric matrices use the symmetric header and store
/// the lower triangle only.
inline void write_matrix_market(std::ostream& out, const SparseMatrix& m)
{
    const bool symmetric = m.is_symmetric();
    std::vector<Triplet> t = m.triplets();
    if (symmetric)
        std::erase_if(t, [](const Triplet& e) { return e.col > e.row; });
    out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general")
        << "\n";
    out << m.nrows() << " " << m.ncols() << " " << t.size() << "\n";
    for (const Triplet& e : t)
        out << e.row + 1 << " " << e.col + 1 << " " << detail::format_double(e.value) << "\n";
}

inline void write_matrix_market(const std::string& path, const SparseMatrix& m)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    write_matrix_market(out, m);
    if (!out)
        throw Error("write failed for '" + path + "'");
}

/// One row of experiment output.
struct RunReport
{
    std::string matrix_name;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::size_t nmv = 0;
    std::optional<double> ratio_before;
    std::optional<double> ratio_after;
    std::optional<double> cond_before;
    std::optional<double> cond_after;
    double wall_time = 0.0;
    std::string status = "ok";

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

enum class ReportFormat
{
    csv,
    json,
};

inline constexpr const char* report_columns[] = {
    "matrix_name", "algorithm", "seed",       "nmv",       "ratio_before",
    "ratio_after", "cond_before", "cond_after", "wall_time", "status"};

namespace detail
{

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_number(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string();
}

inline nlohmann::json json_number(const std::optional<double>& v)
{
    // JSON has no infinity; an infinite condition number is written as a string.
    if (!v)
        return nullptr;
    if (std::isinf(*v))
        return *v > 0 ? "inf" : "-inf";
    return *v;
}

inline std::optional<double> json_to_number(const nlohmann::json& j)
{
    if (j.is_null())
        return std::nullopt;
    if (j.is_string())
        return j.get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity();
    return j.get<double>();
}

} // namespace detail

inline void write_report(std::ostream& out, const std::vector<RunReport>& reports,
                         ReportFormat format)
{
    if (format == ReportFormat::csv) {
        for (std::size_t c = 0; c < std::size(report_columns); ++c)
            out << (c ? "," : "") << report_columns[c];
        out << "\n";
        for (const RunReport& r : reports) {
            out << detail::csv_field(r.matrix_name) << "," << detail::csv_field(r.algorithm) << ","
                << r.seed << "," << r.nmv << "," << detail::csv_number(r.ratio_before) << ","
                << detail::csv_number(r.ratio_after) << "," << detail::csv_number(r.cond_before)
                << "," << detail::csv_number(r.cond_after) << ","
                << detail::format_double(r.wall_time) << "," << detail::csv_field(r.status)
                << "\n";
        }
        return;
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const RunReport& r : reports) {
        nlohmann::ordered_json o;
        o["matrix_name"] = r.matrix_name;
        o["algorithm"] = r.algorithm;
        o["seed"] = r.seed;
        o["nmv"] = r.nmv;
        o["ratio_before"] = detail::json_number(r.ratio_before);
        o["ratio_after"] = detail::json_number(r.ratio_after);
        o["cond_before"] = detail::json_number(r.cond_before);
        o["cond_after"] = detail::json_number(r.cond_after);
        o["wall_time"] = r.wall_time;
        o["status"] = r.status;
        arr.push_back(std::move(o));
    }
    out << arr.dump(2) << "\n";
}

inline void write_report(const std::vector<RunReport>& reports, ReportFormat format,
                         const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    write_report(out, reports, format);
    if (!out)
        throw Error("write failed for '" + path + "'");
}

inline std::vector<RunReport> read_reports_json(std::istream& in)
{
    const nlohmann::json arr = nlohmann::json::parse(in);
    std::vector<RunReport> out;
    for (const auto& o : arr) {
        RunReport r;
        r.matrix_name = o.at("matrix_name").get<std::string>();
        r.algorithm = o.at("algorithm").get<std::string>();
        r.seed = o.at("seed").get<std::uint64_t>();
        r.nmv = o.at("nmv").get<std::size_t>();
        r.ratio_before = detail::json_to_number(o.at("ratio_before"));
        r.ratio_after = detail::json_to_number(o.at("ratio_after"));
        r.cond_before = detail::json_to_number(o.at("cond_before"));
        r.cond_after = detail::json_to_number(o.at("cond_after"));
        r.wall_time = o.at("wall_time").get<double>();
        r.status = o.at("status").get<std::string>();
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace equil

#endif // EQUIL_IO_HPP_
