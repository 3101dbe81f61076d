// csv.hpp — deterministic CSV / binary output.  Identical inputs must produce
// byte-identical files, so all formatting goes through one fixed printf path.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mist/errors.hpp"
#include "mist/operators.hpp"

namespace mist {

struct TimeSeries {
    std::vector<std::string> columns;           // first column is t_ns
    std::vector<std::vector<double>> rows;

    void add_row(const std::vector<double>& r) { rows.push_back(r); }
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_csv(const std::string& path,
                      const std::vector<std::string>& comment_lines,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation
    if (!out) throw ScenarioError("cannot open output file: " + path);
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
    if (!out) throw ScenarioError("write failed: " + path);
}

inline void write_csv(const std::string& path,
                      const std::vector<std::string>& comment_lines,
                      const TimeSeries& ts) {
    write_csv(path, comment_lines, ts.columns, ts.rows);
}

// FNV-1a 64-bit, used to stamp output files with the scenario they came from.
inline std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// State snapshot dump: one little-endian uint64 per subsystem dimension,
// then the row-major complex128 matrix.
inline void write_state_binary(const std::string& path, const std::vector<Index>& dims,
                               const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot open output file: " + path);
    for (Index d : dims) {
        const std::uint64_t v = static_cast<std::uint64_t>(d);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            const double re = m(i, j).real(), imag = m(i, j).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(re));
            out.write(reinterpret_cast<const char*>(&imag), sizeof(imag));
        }
    if (!out) throw ScenarioError("write failed: " + path);
}

inline Matrix read_state_binary(const std::string& path, std::size_t n_subsystems,
                                std::vector<Index>& dims_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open input file: " + path);
    dims_out.resize(n_subsystems);
    Index total = 1;
    for (std::size_t k = 0; k < n_subsystems; ++k) {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        dims_out[k] = static_cast<Index>(v);
        total *= dims_out[k];
    }
    Matrix m(total, total);
    for (Index i = 0; i < total; ++i)
        for (Index j = 0; j < total; ++j) {
            double re = 0, imag = 0;
            in.read(reinterpret_cast<char*>(&re), sizeof(re));
            in.read(reinterpret_cast<char*>(&imag), sizeof(imag));
            m(i, j) = cd(re, imag);
        }
    if (!in) throw ScenarioError("truncated state file: " + path);
    return m;
}

} // namespace mist
