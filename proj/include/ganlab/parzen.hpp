#pragma once

// Gaussian Parzen-window log-likelihood scoring of sample sets, with the
// kernel bandwidth selected by validation-set cross-validation. One scalar
// sigma is shared across dimensions; all log-likelihoods are in nats.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/matrix.hpp"
#include "ganlab/numeric.hpp"

namespace ganlab {

struct ParzenModel {
    Matrix samples;  // n x d
    double sigma = 1.0;

    void validate() const {
        if (samples.rows() == 0) {
            throw std::invalid_argument("ParzenModel: needs at least one sample");
        }
        if (!(sigma > 0.0)) {
            throw std::invalid_argument("ParzenModel: sigma must be positive");
        }
    }
};

/// log[(1/n) sum_i N(x; s_i, sigma^2 I)], evaluated through log-sum-exp so
/// faraway points degrade to very negative values instead of -inf.
inline double parzen_log_density(const ParzenModel& model, std::span<const double> x) {
    model.validate();
    const std::size_t n = model.samples.rows();
    const std::size_t d = model.samples.cols();
    if (x.size() != d) {
        throw std::invalid_argument("parzen_log_density: point has dim " +
                                    std::to_string(x.size()) + ", model has dim " +
                                    std::to_string(d));
    }
    const double inv_two_sigma2 = 1.0 / (2.0 * model.sigma * model.sigma);
    std::vector<double> exponents(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        const double* row = model.samples.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x[j] - row[j];
            sq += diff * diff;
        }
        exponents[i] = -sq * inv_two_sigma2;
    }
    return log_sum_exp(exponents) - std::log(static_cast<double>(n)) -
           0.5 * static_cast<double>(d) *
               std::log(2.0 * std::numbers::pi * model.sigma * model.sigma);
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;  // sample std / sqrt(N)
};

/// Mean per-point log density over the test set and the standard error of
/// that mean. Scoring is per-point and side-effect free, so disjoint point
/// sets may be scored concurrently against the same model.
inline MeanStderr parzen_mean_ll(const ParzenModel& model, const Matrix& test_points) {
    if (test_points.rows() < 2) {
        throw std::invalid_argument("parzen_mean_ll: needs at least 2 test points");
    }
    const std::size_t n = test_points.rows();
    const std::size_t d = test_points.cols();
    std::vector<double> lls(n);
    for (std::size_t i = 0; i < n; ++i) {
        lls[i] = parzen_log_density(model, std::span<const double>(test_points.data() + i * d, d));
    }
    double mean = 0.0;
    for (double v : lls) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : lls) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

/// Grid sigma maximizing mean validation log-likelihood; ties break toward
/// the smaller sigma.
inline double cross_validate_sigma(const Matrix& samples, const Matrix& validation_points,
                                   std::span<const double> sigma_grid) {
    if (sigma_grid.empty()) {
        throw std::invalid_argument("cross_validate_sigma: empty sigma grid");
    }
    std::vector<double> grid(sigma_grid.begin(), sigma_grid.end());
    for (double s : grid) {
        if (!(s > 0.0)) {
            throw std::invalid_argument("cross_validate_sigma: sigma values must be positive");
        }
    }
    std::sort(grid.begin(), grid.end());
    double best_sigma = grid.front();
    double best_ll = -std::numeric_limits<double>::infinity();
    for (double s : grid) {
        const double ll = parzen_mean_ll({samples, s}, validation_points).mean;
        if (ll > best_ll) {
            best_ll = ll;
            best_sigma = s;
        }
    }
    return best_sigma;
}

/// Default bandwidth grid: `count` log-spaced values spanning
/// [0.01, 1] x (pooled per-dimension std of the data).
inline std::vector<double> default_sigma_grid(const Matrix& data, std::size_t count = 20) {
    if (data.rows() < 2 || count == 0) {
        throw std::invalid_argument("default_sigma_grid: needs >= 2 rows and count > 0");
    }
    double pooled = 0.0;
    for (std::size_t c = 0; c < data.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < data.rows(); ++r) mean += data(r, c);
        mean /= static_cast<double>(data.rows());
        double var = 0.0;
        for (std::size_t r = 0; r < data.rows(); ++r) {
            var += (data(r, c) - mean) * (data(r, c) - mean);
        }
        pooled += std::sqrt(var / static_cast<double>(data.rows() - 1));
    }
    pooled /= static_cast<double>(data.cols());
    if (!(pooled > 0.0)) pooled = 1.0;  // degenerate constant data

    std::vector<double> grid(count);
    const double lo = std::log(0.01 * pooled);
    const double hi = std::log(1.0 * pooled);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 1.0
                                    : static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = std::exp(lo + t * (hi - lo));
    }
    return grid;
}

}  // namespace ganlab
