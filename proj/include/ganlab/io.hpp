#pragma once

// File plumbing shared by the datasets and the CLI: CSV point files
// (one point per row, header optional) and atomic write-then-rename output.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/matrix.hpp"

namespace ganlab {

/// Writes content to path via a sibling temp file and rename, so readers
/// never observe a half-written file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("write_file_atomic: short write to " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("read_file: cannot open " + path);
    }
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline bool parse_double(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    return end != begin && *end == '\0' && errno != ERANGE;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace detail

/// Reads a CSV of points (one row per point). A first line that does not
/// parse as numbers is treated as a header and skipped.
inline Matrix read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_points_csv: cannot open " + path);
    }
    std::vector<double> values;
    std::size_t cols = 0, rows = 0, line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = detail::split_csv_line(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!detail::parse_double(fields[i], row[i])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (rows == 0) continue;  // header line
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": non-numeric field in point row");
        }
        if (rows == 0) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": row has " +
                                     std::to_string(row.size()) + " fields, expected " +
                                     std::to_string(cols));
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) {
        throw std::runtime_error("read_points_csv: no data rows in " + path);
    }
    return Matrix(rows, cols, std::move(values));
}

/// Writes points as CSV with full round-trip precision. `header` may be
/// empty. The write is atomic.
inline void write_points_csv(const std::string& path, const Matrix& points,
                             const std::string& header = "") {
    std::string out;
    if (!header.empty()) {
        out += header;
        out += '\n';
    }
    for (std::size_t r = 0; r < points.rows(); ++r) {
        for (std::size_t c = 0; c < points.cols(); ++c) {
            if (c) out += ',';
            out += format_double(points(r, c));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

}  // namespace ganlab
