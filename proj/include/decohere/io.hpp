#pragma once

// Text formats: coupling matrices, tabulated spectral densities, bath files
// and the versioned CSV used for every numeric output.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "decohere/environment.hpp"
#include "decohere/errors.hpp"
#include "decohere/registers.hpp"

#ifndef DECOHERE_VERSION
#define DECOHERE_VERSION "0.0.0"
#endif

namespace decohere::io {

inline constexpr const char* version = DECOHERE_VERSION;

/// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw numeric_error("format_number: conversion failed");
    return {buf, ptr};
}

inline double parse_number(std::string_view text, const std::string& where) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text == "nan") return std::nan("");
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw domain_error(where + ": cannot parse '" + std::string(text) + "' as a number");
    }
    return v;
}

namespace impl {

inline std::vector<std::vector<double>> read_rows(std::istream& in, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<double> row;
        std::string token;
        while (fields >> token) row.push_back(parse_number(token, source + ":" + std::to_string(line_no)));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open '" + path + "'");
    return in;
}

} // namespace impl

/// One row of whitespace-separated reals per system label; '#' starts a comment.
inline registers::CouplingMatrix<double> read_coupling_matrix(std::istream& in, const std::string& source = "matrix") {
    auto rows = impl::read_rows(in, source);
    detail::require(!rows.empty(), source + ": coupling matrix is empty");
    const auto width = rows.front().size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail::require(rows[i].size() == width, source + ": row " + std::to_string(i + 1) + " has " +
                                                     std::to_string(rows[i].size()) + " entries, expected " +
                                                     std::to_string(width));
    }
    return registers::CouplingMatrix<double>(std::move(rows));
}

inline registers::CouplingMatrix<double> load_coupling_matrix(const std::string& path) {
    auto in = impl::open_input(path);
    return read_coupling_matrix(in, path);
}

/// Two columns: omega and the weight rho(omega) g^2(omega).
inline environment::SpectralDensity read_tabulated_density(std::istream& in, double cutoff,
                                                           const std::string& source = "spectrum") {
    auto rows = impl::read_rows(in, source);
    std::vector<double> omegas, weights;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail::require(rows[i].size() == 2, source + ": row " + std::to_string(i + 1) + " must have 2 columns");
        omegas.push_back(rows[i][0]);
        weights.push_back(rows[i][1]);
    }
    return environment::SpectralDensity::tabulated(std::move(omegas), std::move(weights), cutoff);
}

inline environment::SpectralDensity load_tabulated_density(const std::string& path, double cutoff) {
    auto in = impl::open_input(path);
    return read_tabulated_density(in, cutoff, path);
}

/// Two columns: omega_j and g_j.
inline environment::DiscreteBath read_bath(std::istream& in, const std::string& source = "bath") {
    auto rows = impl::read_rows(in, source);
    std::vector<environment::BathMode> modes;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail::require(rows[i].size() == 2, source + ": row " + std::to_string(i + 1) + " must have 2 columns");
        modes.emplace_back(rows[i][0], rows[i][1]);
    }
    return environment::DiscreteBath(std::move(modes));
}

inline environment::DiscreteBath load_bath(const std::string& path) {
    auto in = impl::open_input(path);
    return read_bath(in, path);
}

inline void write_bath(std::ostream& out, const environment::DiscreteBath& bath) {
    out << "# omega g\n";
    for (const auto& m : bath.modes()) out << format_number(m.omega) << ' ' << format_number(m.g) << '\n';
}

/// CSV with a single "# decohere <version> | col,col,..." header line.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::vector<std::string> columns) : out_(out), width_(columns.size()) {
        detail::require(!columns.empty(), "CsvWriter: no columns");
        out_ << "# decohere " << version << " | ";
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        detail::require(values.size() == width_, "CsvWriter: row width does not match the header");
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
        out_ << '\n';
    }

private:
    std::ostream& out_;
    std::size_t width_;
};

struct CsvTable {
    std::string producer;  ///< "decohere <version>"
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(std::istream& in, const std::string& source = "csv") {
    CsvTable table;
    std::string line;
    detail::require(static_cast<bool>(std::getline(in, line)), source + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto bar = line.find(" | ");
    detail::require(line.rfind("# ", 0) == 0 && bar != std::string::npos,
                    source + ": first line must be '# <producer> | <columns>'");
    table.producer = line.substr(2, bar - 2);
    std::stringstream cols(line.substr(bar + 3));
    for (std::string c; std::getline(cols, c, ',');) table.columns.push_back(c);
    detail::require(!table.columns.empty(), source + ": header names no columns");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        std::vector<double> row;
        std::stringstream fields(line);
        for (std::string f; std::getline(fields, f, ',');) row.push_back(parse_number(f, where));
        detail::require(row.size() == table.columns.size(), where + ": expected " +
                                                                std::to_string(table.columns.size()) + " fields, got " +
                                                                std::to_string(row.size()));
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace decohere::io
