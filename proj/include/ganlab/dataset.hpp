#pragma once

// Datasets: in-memory point collections with provenance, IDX-format
// ingestion (the MNIST distribution layout: big-endian, magic-numbered),
// and seed-deterministic shuffle splits.

#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/matrix.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

struct Dataset {
    Matrix points;
    std::vector<int> labels;  // empty when unlabeled
    std::string provenance;

    std::size_t size() const { return points.rows(); }
};

namespace detail {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

inline std::uint32_t read_be_u32(std::istream& in, const std::string& path,
                                 std::size_t offset) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (in.gcount() != 4) {
        throw std::runtime_error(path + ": truncated at byte offset " + std::to_string(offset) +
                                 " while reading a 32-bit header field");
    }
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

inline void write_be_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

}  // namespace detail

/// Loads an IDX file. Image files (magic 0x00000803) become one row per
/// image with pixels scaled to [0,1] by /255; label files (magic
/// 0x00000801) fill `labels` and leave `points` empty.
inline Dataset load_idx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("load_idx: cannot open " + path);
    }
    std::size_t offset = 0;
    const std::uint32_t magic = detail::read_be_u32(in, path, offset);
    offset += 4;

    Dataset ds;
    ds.provenance = path;
    if (magic == detail::kIdxImagesMagic) {
        const std::uint32_t n = detail::read_be_u32(in, path, offset);
        offset += 4;
        const std::uint32_t rows = detail::read_be_u32(in, path, offset);
        offset += 4;
        const std::uint32_t cols = detail::read_be_u32(in, path, offset);
        offset += 4;
        const std::size_t pixels = std::size_t(n) * rows * cols;
        std::vector<unsigned char> raw(pixels);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(pixels));
        if (static_cast<std::size_t>(in.gcount()) != pixels) {
            throw std::runtime_error(path + ": truncated at byte offset " +
                                     std::to_string(offset + static_cast<std::size_t>(in.gcount())) +
                                     " (expected " + std::to_string(pixels) + " pixel bytes)");
        }
        Matrix points(n, std::size_t(rows) * cols);
        for (std::size_t i = 0; i < pixels; ++i) {
            points.values()[i] = static_cast<double>(raw[i]) / 255.0;
        }
        ds.points = std::move(points);
    } else if (magic == detail::kIdxLabelsMagic) {
        const std::uint32_t n = detail::read_be_u32(in, path, offset);
        offset += 4;
        std::vector<unsigned char> raw(n);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) {
            throw std::runtime_error(path + ": truncated at byte offset " +
                                     std::to_string(offset + static_cast<std::size_t>(in.gcount())) +
                                     " (expected " + std::to_string(n) + " label bytes)");
        }
        ds.labels.assign(raw.begin(), raw.end());
    } else {
        char hex[16];
        std::snprintf(hex, sizeof(hex), "0x%08x", magic);
        throw std::runtime_error(path + ": bad IDX magic " + hex + " at byte offset 0");
    }
    return ds;
}

/// Writes points in [0,1] as an IDX image file (values quantized by
/// round(v*255)); the row/col split must cover the point width exactly.
inline void write_idx_images(const std::string& path, const Matrix& points,
                             std::uint32_t img_rows, std::uint32_t img_cols) {
    if (std::size_t(img_rows) * img_cols != points.cols()) {
        throw std::invalid_argument("write_idx_images: image dims " + std::to_string(img_rows) +
                                    "x" + std::to_string(img_cols) + " do not cover width " +
                                    std::to_string(points.cols()));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("write_idx_images: cannot open " + path);
    }
    detail::write_be_u32(out, detail::kIdxImagesMagic);
    detail::write_be_u32(out, static_cast<std::uint32_t>(points.rows()));
    detail::write_be_u32(out, img_rows);
    detail::write_be_u32(out, img_cols);
    for (double v : points.values()) {
        const double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        const auto byte = static_cast<unsigned char>(std::lround(clamped * 255.0));
        out.put(static_cast<char>(byte));
    }
    if (!out) {
        throw std::runtime_error("write_idx_images: short write to " + path);
    }
}

inline void write_idx_labels(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("write_idx_labels: cannot open " + path);
    }
    detail::write_be_u32(out, detail::kIdxLabelsMagic);
    detail::write_be_u32(out, static_cast<std::uint32_t>(labels.size()));
    for (int label : labels) {
        out.put(static_cast<char>(static_cast<unsigned char>(label)));
    }
}

struct SplitResult {
    Dataset train;
    Dataset valid;
    Dataset test;
};

/// Disjoint, exhaustive, seed-deterministic shuffle split. Fractions must be
/// positive and sum to 1; the first two sizes are rounded, the test split
/// takes the remainder.
inline SplitResult split(const Dataset& dataset, double f_train, double f_valid, double f_test,
                         std::uint64_t seed) {
    if (!(f_train > 0.0) || !(f_valid > 0.0) || !(f_test > 0.0) ||
        std::abs(f_train + f_valid + f_test - 1.0) > 1e-9) {
        throw std::invalid_argument("split: fractions must be positive and sum to 1");
    }
    const std::size_t n = dataset.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngState rng(seed);
    for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates
        std::swap(order[i - 1], order[rng.next_index(i)]);
    }

    std::size_t n_train = static_cast<std::size_t>(std::llround(f_train * static_cast<double>(n)));
    std::size_t n_valid = static_cast<std::size_t>(std::llround(f_valid * static_cast<double>(n)));
    n_train = std::min(n_train, n);
    n_valid = std::min(n_valid, n - n_train);

    auto take = [&](std::size_t begin, std::size_t count, const char* part) {
        Dataset out;
        out.points = Matrix(count, dataset.points.cols());
        if (!dataset.labels.empty()) out.labels.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t src = order[begin + i];
            for (std::size_t c = 0; c < dataset.points.cols(); ++c) {
                out.points(i, c) = dataset.points(src, c);
            }
            if (!dataset.labels.empty()) out.labels[i] = dataset.labels[src];
        }
        out.provenance = dataset.provenance + " [" + part + " split]";
        return out;
    };

    SplitResult result;
    result.train = take(0, n_train, "train");
    result.valid = take(n_train, n_valid, "valid");
    result.test = take(n_train + n_valid, n - n_train - n_valid, "test");
    return result;
}

}  // namespace ganlab
