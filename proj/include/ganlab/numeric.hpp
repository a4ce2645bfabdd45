#pragma once

// Overflow-safe scalar primitives shared across the library.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace ganlab {

/// log(sum_i exp(v_i)) via max-shift; never overflows for finite input.
inline double log_sum_exp(std::span<const double> v) {
    if (v.empty()) {
        throw std::invalid_argument("log_sum_exp: empty input");
    }
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;  // all -inf, or a stray +inf, dominates
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

/// Logistic function, computed branch-wise so exp never overflows.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace ganlab
