#pragma once

// Discretized densities over a fixed 1-D grid, and the closed-form minimax
// quantities that become exactly checkable on them: the optimal discriminator
// a/(a+b), KL and Jensen-Shannon divergences, the virtual criterion
// C(G) = -log 4 + 2*JSD, and convergence of density-space gradient descent.
//
// All divergences are in nats. The zero-bin convention is 0*log(0) = 0
// throughout; the optimal discriminator is undefined only on bins where both
// densities vanish.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/numeric.hpp"

namespace ganlab {

struct GridDensity {
    std::vector<double> grid;   // ordered bin centers with uniform spacing
    std::vector<double> probs;  // nonnegative, sums to 1

    double spacing() const {
        if (grid.size() < 2) return 1.0;
        return grid[1] - grid[0];
    }

    void validate() const {
        if (grid.empty() || grid.size() != probs.size()) {
            throw std::invalid_argument("GridDensity: grid/probs length mismatch");
        }
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw std::invalid_argument("GridDensity: negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("GridDensity: probabilities sum to " +
                                        std::to_string(sum) + ", not 1");
        }
    }

    /// Build from nonnegative weights, renormalizing to sum 1.
    static GridDensity normalized(std::vector<double> grid, std::vector<double> weights) {
        if (grid.size() != weights.size() || grid.empty()) {
            throw std::invalid_argument("GridDensity::normalized: length mismatch");
        }
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) {
                throw std::invalid_argument("GridDensity::normalized: negative weight");
            }
            sum += w;
        }
        if (!(sum > 0.0)) {
            throw std::invalid_argument("GridDensity::normalized: all weights zero");
        }
        for (double& w : weights) w /= sum;
        GridDensity d{std::move(grid), std::move(weights)};
        return d;
    }
};

/// Bin centers of `bins` equal-width bins covering [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t bins) {
    if (!(hi > lo) || bins == 0) {
        throw std::invalid_argument("uniform_grid: requires hi > lo and bins > 0");
    }
    const double delta = (hi - lo) / static_cast<double>(bins);
    std::vector<double> centers(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        centers[i] = lo + (static_cast<double>(i) + 0.5) * delta;
    }
    return centers;
}

inline void require_same_grid(const GridDensity& p, const GridDensity& q, const char* op) {
    if (p.grid != q.grid) {
        throw std::invalid_argument(std::string(op) + ": densities live on different grids");
    }
}

/// Maximizer of y -> a*log(y) + b*log(1-y) over [0,1].
inline double y_star(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) {
        throw std::invalid_argument("y_star: requires a, b >= 0");
    }
    if (a == 0.0 && b == 0.0) {
        throw std::invalid_argument("y_star: undefined for a = b = 0");
    }
    return a / (a + b);
}

/// Per-bin values of the optimal discriminator; `defined[i]` is false on
/// bins outside the union of the two supports.
struct DiscriminatorField {
    std::vector<double> values;
    std::vector<std::uint8_t> defined;
};

inline DiscriminatorField optimal_discriminator(const GridDensity& p_data,
                                                const GridDensity& p_g) {
    require_same_grid(p_data, p_g, "optimal_discriminator");
    DiscriminatorField field;
    field.values.resize(p_data.probs.size(), 0.0);
    field.defined.resize(p_data.probs.size(), 0);
    for (std::size_t i = 0; i < p_data.probs.size(); ++i) {
        const double a = p_data.probs[i];
        const double b = p_g.probs[i];
        if (a == 0.0 && b == 0.0) continue;
        field.values[i] = y_star(a, b);
        field.defined[i] = 1;
    }
    return field;
}

/// KL(p || q) in nats; +infinity when p has mass where q has none.
inline double kl(const GridDensity& p, const GridDensity& q) {
    require_same_grid(p, q, "kl");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        const double pi = p.probs[i];
        if (pi == 0.0) continue;
        const double qi = q.probs[i];
        if (qi == 0.0) return std::numeric_limits<double>::infinity();
        sum += pi * std::log(pi / qi);
    }
    return sum;
}

/// Jensen-Shannon divergence in nats; always finite, in [0, log 2].
inline double jsd(const GridDensity& p, const GridDensity& q) {
    require_same_grid(p, q, "jsd");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        const double pi = p.probs[i];
        const double qi = q.probs[i];
        const double mi = 0.5 * (pi + qi);
        if (pi > 0.0) sum += 0.5 * pi * std::log(pi / mi);
        if (qi > 0.0) sum += 0.5 * qi * std::log(qi / mi);
    }
    return sum;
}

/// C(G) = max_D V(G, D), computed two independent ways and cross-checked:
/// the expectation form under the optimal discriminator, and
/// -log 4 + 2*JSD(p_data || p_g). Disagreement beyond 1e-10 means a bug.
inline double virtual_criterion(const GridDensity& p_data, const GridDensity& p_g) {
    require_same_grid(p_data, p_g, "virtual_criterion");
    double expectation_form = 0.0;
    for (std::size_t i = 0; i < p_data.probs.size(); ++i) {
        const double a = p_data.probs[i];
        const double b = p_g.probs[i];
        // log D* = log(a/(a+b)) and log(1-D*) = log(b/(a+b)), written as
        // ratios so that b << a cannot cancel 1-D* down to an exact zero.
        if (a > 0.0) expectation_form += a * std::log(a / (a + b));
        if (b > 0.0) expectation_form += b * std::log(b / (a + b));
    }
    const double jsd_form = -std::log(4.0) + 2.0 * jsd(p_data, p_g);
    if (std::abs(expectation_form - jsd_form) > 1e-10) {
        throw std::logic_error("virtual_criterion: expectation and JSD routes disagree by " +
                               std::to_string(std::abs(expectation_form - jsd_form)));
    }
    return expectation_form;
}

struct DescentRecord {
    std::size_t step = 0;
    double criterion = 0.0;
    double jsd_to_target = 0.0;
    std::vector<double> probs;
};

struct DescentResult {
    std::vector<DescentRecord> trajectory;  // entry 0 is the starting point
    GridDensity final_density;
    bool aborted = false;  // non-finite gradient encountered
};

namespace detail {

inline std::vector<double> softmax(const std::vector<double>& logits) {
    const double m = log_sum_exp(std::span<const double>(logits));
    std::vector<double> probs(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) probs[i] = std::exp(logits[i] - m);
    return probs;
}

}  // namespace detail

/// Gradient descent on C(G) over the probability simplex, with p_g
/// parameterized as softmax of per-bin logits. The per-bin gradient is taken
/// at the current optimal discriminator, log(p_g / (p_data + p_g)), then
/// pulled back through the softmax. With backtracking enabled the step size
/// is halved until C decreases, so the recorded criterion never increases.
inline DescentResult density_descent(const GridDensity& p_data, const GridDensity& p_g0,
                                     std::size_t steps, double lr, bool backtracking = true) {
    require_same_grid(p_data, p_g0, "density_descent");
    if (!(lr > 0.0)) {
        throw std::invalid_argument("density_descent: lr must be positive");
    }
    for (double p : p_g0.probs) {
        if (!(p > 0.0)) {
            throw std::invalid_argument("density_descent: start must be strictly positive");
        }
    }

    std::vector<double> logits(p_g0.probs.size());
    for (std::size_t i = 0; i < logits.size(); ++i) logits[i] = std::log(p_g0.probs[i]);

    DescentResult result;
    GridDensity current{p_data.grid, p_g0.probs};
    double criterion = virtual_criterion(p_data, current);
    result.trajectory.push_back({0, criterion, jsd(current, p_data), current.probs});

    const std::size_t n = logits.size();
    for (std::size_t step = 1; step <= steps; ++step) {
        // d C / d p_g at the optimal discriminator, then softmax pullback.
        std::vector<double> grad_p(n), grad_logit(n);
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            grad_p[i] = std::log(current.probs[i] / (p_data.probs[i] + current.probs[i]));
            finite = finite && std::isfinite(grad_p[i]);
        }
        if (!finite) {
            result.aborted = true;
            break;
        }
        double mean_grad = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean_grad += current.probs[i] * grad_p[i];
        for (std::size_t i = 0; i < n; ++i) {
            grad_logit[i] = current.probs[i] * (grad_p[i] - mean_grad);
        }

        double eta = lr;
        std::vector<double> next_logits(n);
        GridDensity next{p_data.grid, {}};
        double next_criterion = criterion;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            for (std::size_t i = 0; i < n; ++i) next_logits[i] = logits[i] - eta * grad_logit[i];
            next.probs = detail::softmax(next_logits);
            next_criterion = virtual_criterion(p_data, next);
            if (!backtracking || next_criterion <= criterion) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (accepted) {
            logits = std::move(next_logits);
            current.probs = std::move(next.probs);
            criterion = next_criterion;
        }
        // If no decreasing step was found we are numerically stationary; the
        // point (and the recorded criterion) stay put.
        result.trajectory.push_back({step, criterion, jsd(current, p_data), current.probs});
    }

    result.final_density = std::move(current);
    return result;
}

/// Normalized 32-bin-style histogram of 1-D samples on the given centers;
/// samples outside the grid span are clamped to the edge bins.
inline GridDensity histogram_density(std::span<const double> samples,
                                     std::vector<double> grid) {
    if (samples.empty() || grid.empty()) {
        throw std::invalid_argument("histogram_density: empty samples or grid");
    }
    const double delta = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
    const double lo = grid.front() - 0.5 * delta;
    std::vector<double> counts(grid.size(), 0.0);
    for (double x : samples) {
        auto bin = static_cast<std::ptrdiff_t>(std::floor((x - lo) / delta));
        if (bin < 0) bin = 0;
        if (bin >= static_cast<std::ptrdiff_t>(grid.size())) {
            bin = static_cast<std::ptrdiff_t>(grid.size()) - 1;
        }
        counts[static_cast<std::size_t>(bin)] += 1.0;
    }
    return GridDensity::normalized(std::move(grid), std::move(counts));
}

}  // namespace ganlab
