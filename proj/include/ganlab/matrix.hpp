#pragma once

// Dense row-major matrix of doubles. The single numeric carrier used by the
// networks, densities and evaluators in this library. Matrices are plain
// values: every operation returns a fresh result and never aliases its
// inputs, so const refs can be shared freely across threads.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace ganlab {

class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_) {
            throw std::invalid_argument(
                "Matrix: value count " + std::to_string(values_.size()) +
                " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
        }
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m;
        m.rows_ = rows.size();
        m.cols_ = rows.size() ? rows.begin()->size() : 0;
        m.values_.reserve(m.rows_ * m.cols_);
        for (const auto& row : rows) {
            if (row.size() != m.cols_) {
                throw std::invalid_argument("Matrix::from_rows: ragged row lengths");
            }
            m.values_.insert(m.values_.end(), row.begin(), row.end());
        }
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    /// Copy of row r as a 1 x cols matrix.
    Matrix row(std::size_t r) const {
        Matrix out(1, cols_);
        for (std::size_t c = 0; c < cols_; ++c) out(0, c) = (*this)(r, c);
        return out;
    }

    Matrix& operator+=(const Matrix& other) {
        check_same_shape(other, "+=");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
        return *this;
    }

    Matrix& operator-=(const Matrix& other) {
        check_same_shape(other, "-=");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
        return *this;
    }

    Matrix& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
    }

private:
    void check_same_shape(const Matrix& other, const char* op) const {
        if (!same_shape(other)) {
            throw std::invalid_argument(std::string("Matrix ") + op + ": shape mismatch " +
                                        shape_str() + " vs " + other.shape_str());
        }
    }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + " do not match");
    }
    Matrix out(a.rows(), b.cols(), 0.0);
    // i-k-j order keeps the inner loop contiguous in both b and out.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.data() + k * b.cols();
            double* orow = out.data() + i * out.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

inline Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
    return out;
}

/// Elementwise product.
inline Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("hadamard: shape mismatch");
    }
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= b.values()[i];
    return out;
}

inline bool all_finite(const Matrix& m) {
    for (double v : m.values())
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace ganlab
