#pragma once

// Shared scaffolding for the test suite: finite-difference gradient
// checking, tie-margin verification for piecewise-linear activations, and
// temp-directory plumbing for file-based tests.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <unistd.h>

#include "ganlab/ganlab.hpp"

namespace testutil {

/// Relative error with a floor that keeps dead-unit noise (both values
/// ~ 0) from reading as disagreement.
inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), 1e-4);
}

struct GradCheck {
    double worst = 0.0;
    std::size_t checked = 0;
};

/// Central-difference check of every parameter gradient in `analytic`
/// against the scalar `loss(mlp)`. The loss must be a pure function of the
/// parameters (any dropout replay is the caller's business).
template <typename Loss>
GradCheck finite_difference_check(ganlab::Mlp& mlp, const ganlab::Gradients& analytic,
                                  Loss&& loss, double h = 1e-5) {
    GradCheck result;
    auto probe = [&](double& w, double analytic_g) {
        const double keep = w;
        w = keep + h;
        const double up = loss(std::as_const(mlp));
        w = keep - h;
        const double down = loss(std::as_const(mlp));
        w = keep;
        const double fd = (up - down) / (2.0 * h);
        result.worst = std::max(result.worst, rel_err(fd, analytic_g));
        ++result.checked;
    };
    for (std::size_t l = 0; l < mlp.params.size(); ++l) {
        for (std::size_t p = 0; p < mlp.params[l].weights.size(); ++p) {
            auto& w = mlp.params[l].weights[p].values();
            const auto& gw = analytic.layers[l].weights[p].values();
            for (std::size_t i = 0; i < w.size(); ++i) probe(w[i], gw[i]);
            auto& b = mlp.params[l].biases[p].values();
            const auto& gb = analytic.layers[l].biases[p].values();
            for (std::size_t i = 0; i < b.size(); ++i) probe(b[i], gb[i]);
        }
    }
    return result;
}

/// Smallest distance to a relu zero crossing or a maxout piece tie across
/// the whole batch. Finite-difference checks are only trustworthy when this
/// margin comfortably exceeds the probe step.
inline double tie_margin(const ganlab::Mlp& mlp, const ganlab::Matrix& batch) {
    double margin = std::numeric_limits<double>::infinity();
    const ganlab::ForwardTrace trace = ganlab::forward(mlp, batch, ganlab::RunMode::Infer);
    for (std::size_t l = 0; l < mlp.specs.size(); ++l) {
        const auto& s = mlp.specs[l];
        const auto& blocks = mlp.params[l];
        const ganlab::Matrix& x = trace.outputs[l];
        if (s.activation == ganlab::Activation::Maxout) {
            std::vector<ganlab::Matrix> pre;
            pre.reserve(s.pieces());
            for (std::size_t p = 0; p < s.pieces(); ++p) {
                ganlab::Matrix m = ganlab::matmul(x, blocks.weights[p]);
                for (std::size_t i = 0; i < m.rows(); ++i)
                    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += blocks.biases[p](0, j);
                pre.push_back(std::move(m));
            }
            for (std::size_t i = 0; i < x.rows(); ++i)
                for (std::size_t j = 0; j < s.out_dim; ++j) {
                    double top = -std::numeric_limits<double>::infinity(), second = top;
                    for (std::size_t p = 0; p < s.pieces(); ++p) {
                        const double v = pre[p](i, j);
                        if (v > top) {
                            second = top;
                            top = v;
                        } else if (v > second) {
                            second = v;
                        }
                    }
                    margin = std::min(margin, top - second);
                }
        } else if (s.activation == ganlab::Activation::Relu) {
            ganlab::Matrix m = ganlab::matmul(x, blocks.weights[0]);
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j) {
                    margin = std::min(margin, std::abs(m(i, j) + blocks.biases[0](0, j)));
                }
        }
    }
    return margin;
}

/// Fresh scratch directory under the system temp dir, removed on scope exit.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               (tag + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace testutil
