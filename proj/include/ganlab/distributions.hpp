#pragma once

// Ground-truth data distributions with samplers and exact densities.
// The 1-D kinds discretize onto theory-module grids; ring2d is the 2-D
// synthetic target whose density is known in closed form through the
// modified Bessel function I0.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ganlab/grid_density.hpp"
#include "ganlab/matrix.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

namespace detail {

inline double gaussian_pdf(double x, double mean, double stddev) {
    const double z = (x - mean) / stddev;
    return std::exp(-0.5 * z * z) / (stddev * std::sqrt(2.0 * std::numbers::pi));
}

/// log I0(z) for z >= 0. The direct evaluation is exact to double precision
/// until I0 itself overflows (z ~ 714); past that the asymptotic series
/// e^z/sqrt(2 pi z) * (1 + 1/8z + 9/128z^2 + 75/1024z^3 + 11025/98304z^4)
/// carries a relative truncation error below 2e-15.
inline double log_bessel_i0(double z) {
    if (z < 700.0) {
        return std::log(std::cyl_bessel_i(0.0, z));
    }
    const double u = 1.0 / z;
    const double tail =
        u * (1.0 / 8.0 + u * (9.0 / 128.0 + u * (75.0 / 1024.0 + u * (11025.0 / 98304.0))));
    return z - 0.5 * std::log(2.0 * std::numbers::pi * z) + std::log1p(tail);
}

}  // namespace detail

struct GaussianSpec {
    double mean = 0.0;
    double stddev = 1.0;
};

struct GaussianMixtureSpec {
    std::vector<double> weights;
    std::vector<GaussianSpec> components;
};

struct UniformSpec {
    double lo = 0.0;
    double hi = 1.0;
};

/// Circle of the given radius convolved with isotropic Gaussian noise.
struct Ring2dSpec {
    double radius = 1.0;
    double noise_std = 0.1;
};

class Distribution {
public:
    static Distribution gaussian(double mean, double stddev) {
        if (!(stddev > 0.0)) {
            throw std::invalid_argument("Distribution::gaussian: stddev must be positive");
        }
        return Distribution(GaussianSpec{mean, stddev});
    }

    static Distribution gaussian_mixture(std::vector<double> weights,
                                         std::vector<GaussianSpec> components) {
        if (weights.empty() || weights.size() != components.size()) {
            throw std::invalid_argument("Distribution::gaussian_mixture: weights/components "
                                        "length mismatch");
        }
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) {
                throw std::invalid_argument("Distribution::gaussian_mixture: negative weight");
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("Distribution::gaussian_mixture: weights sum to " +
                                        std::to_string(sum) + ", not 1");
        }
        for (double& w : weights) w /= sum;
        for (const auto& c : components) {
            if (!(c.stddev > 0.0)) {
                throw std::invalid_argument("Distribution::gaussian_mixture: component stddev "
                                            "must be positive");
            }
        }
        return Distribution(GaussianMixtureSpec{std::move(weights), std::move(components)});
    }

    static Distribution uniform(double lo, double hi) {
        if (!(hi > lo)) {
            throw std::invalid_argument("Distribution::uniform: requires hi > lo");
        }
        return Distribution(UniformSpec{lo, hi});
    }

    static Distribution ring2d(double radius, double noise_std) {
        if (!(radius > 0.0) || !(noise_std > 0.0)) {
            throw std::invalid_argument("Distribution::ring2d: radius and noise_std must be "
                                        "positive");
        }
        return Distribution(Ring2dSpec{radius, noise_std});
    }

    std::size_t dim() const {
        return std::holds_alternative<Ring2dSpec>(spec_) ? 2 : 1;
    }

    /// n i.i.d. draws, one per row.
    Matrix sample(std::size_t n, RngState& rng) const {
        if (n == 0) {
            throw std::invalid_argument("Distribution::sample: n must be >= 1");
        }
        Matrix out(n, dim());
        if (const auto* g = std::get_if<GaussianSpec>(&spec_)) {
            for (std::size_t i = 0; i < n; ++i) out(i, 0) = rng.next_gaussian(g->mean, g->stddev);
        } else if (const auto* u = std::get_if<UniformSpec>(&spec_)) {
            for (std::size_t i = 0; i < n; ++i) out(i, 0) = rng.next_uniform(u->lo, u->hi);
        } else if (const auto* m = std::get_if<GaussianMixtureSpec>(&spec_)) {
            for (std::size_t i = 0; i < n; ++i) {
                const double u01 = rng.next_uniform();
                std::size_t c = 0;
                double acc = 0.0;
                for (; c + 1 < m->weights.size(); ++c) {
                    acc += m->weights[c];
                    if (u01 < acc) break;
                }
                out(i, 0) = rng.next_gaussian(m->components[c].mean, m->components[c].stddev);
            }
        } else {
            const auto& r = std::get<Ring2dSpec>(spec_);
            for (std::size_t i = 0; i < n; ++i) {
                const double theta = rng.next_uniform(0.0, 2.0 * std::numbers::pi);
                out(i, 0) = r.radius * std::cos(theta) + rng.next_gaussian(0.0, r.noise_std);
                out(i, 1) = r.radius * std::sin(theta) + rng.next_gaussian(0.0, r.noise_std);
            }
        }
        return out;
    }

    double pdf(std::span<const double> x) const {
        if (x.size() != dim()) {
            throw std::invalid_argument("Distribution::pdf: point has dim " +
                                        std::to_string(x.size()) + ", expected " +
                                        std::to_string(dim()));
        }
        if (const auto* g = std::get_if<GaussianSpec>(&spec_)) {
            return detail::gaussian_pdf(x[0], g->mean, g->stddev);
        }
        if (const auto* u = std::get_if<UniformSpec>(&spec_)) {
            return (x[0] >= u->lo && x[0] <= u->hi) ? 1.0 / (u->hi - u->lo) : 0.0;
        }
        if (const auto* m = std::get_if<GaussianMixtureSpec>(&spec_)) {
            double p = 0.0;
            for (std::size_t c = 0; c < m->weights.size(); ++c) {
                p += m->weights[c] *
                     detail::gaussian_pdf(x[0], m->components[c].mean, m->components[c].stddev);
            }
            return p;
        }
        // Marginal of radius*(cos t, sin t) + N(0, s^2 I) over t ~ U(0, 2pi):
        //   f(x) = exp(-(|x|^2 + R^2)/(2 s^2)) * I0(R|x|/s^2) / (2 pi s^2)
        const auto& r = std::get<Ring2dSpec>(spec_);
        const double s2 = r.noise_std * r.noise_std;
        const double norm = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        const double log_pdf = -std::log(2.0 * std::numbers::pi * s2) -
                               (norm * norm + r.radius * r.radius) / (2.0 * s2) +
                               detail::log_bessel_i0(r.radius * norm / s2);
        return std::exp(log_pdf);
    }

    double pdf(double x) const { return pdf(std::span<const double>(&x, 1)); }

    /// Bin probabilities proportional to pdf at bin centers, renormalized.
    /// 1-D distributions only.
    GridDensity discretize(std::vector<double> grid) const {
        if (dim() != 1) {
            throw std::invalid_argument("Distribution::discretize: only 1-D distributions "
                                        "discretize onto a grid");
        }
        std::vector<double> weights(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) weights[i] = pdf(grid[i]);
        return GridDensity::normalized(std::move(grid), std::move(weights));
    }

    std::string describe() const {
        if (const auto* g = std::get_if<GaussianSpec>(&spec_)) {
            return "gaussian(mean=" + std::to_string(g->mean) +
                   ", std=" + std::to_string(g->stddev) + ")";
        }
        if (const auto* u = std::get_if<UniformSpec>(&spec_)) {
            return "uniform(" + std::to_string(u->lo) + ", " + std::to_string(u->hi) + ")";
        }
        if (const auto* m = std::get_if<GaussianMixtureSpec>(&spec_)) {
            return "gaussian_mixture(" + std::to_string(m->components.size()) + " components)";
        }
        const auto& r = std::get<Ring2dSpec>(spec_);
        return "ring2d(radius=" + std::to_string(r.radius) +
               ", noise_std=" + std::to_string(r.noise_std) + ")";
    }

    const GaussianSpec* as_gaussian() const { return std::get_if<GaussianSpec>(&spec_); }
    const UniformSpec* as_uniform() const { return std::get_if<UniformSpec>(&spec_); }
    const GaussianMixtureSpec* as_mixture() const {
        return std::get_if<GaussianMixtureSpec>(&spec_);
    }
    const Ring2dSpec* as_ring2d() const { return std::get_if<Ring2dSpec>(&spec_); }

private:
    using Spec = std::variant<GaussianSpec, GaussianMixtureSpec, UniformSpec, Ring2dSpec>;
    explicit Distribution(Spec spec) : spec_(std::move(spec)) {}
    Spec spec_;
};

}  // namespace ganlab
