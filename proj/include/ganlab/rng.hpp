#pragma once

// Seeded pseudo-randomness with a fixed, documented algorithm so that every
// draw is reproducible bit-for-bit across runs and platforms.
//
// Stream construction:
//   * the 64-bit seed is expanded into 256 bits of state with splitmix64
//   * the stream itself is xoshiro256++ (Blackman & Vigna)
//   * uniform doubles in [0,1) take the top 53 bits of each output word
//   * gaussians use the Box-Muller cosine branch, consuming exactly two
//     uniforms per draw (no spare caching, so the stream position after
//     n draws is independent of call batching)
//
// RngState is a plain value: copy it to replay a stream, or call split()
// to derive an independent child stream for parallel work. A single state
// must not be shared across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ganlab {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

}  // namespace detail

class RngState {
public:
    explicit RngState(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t seed() const { return seed_; }

    /// Next raw 64-bit word (xoshiro256++).
    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0,1).
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) {
        if (!(hi > lo)) {
            throw std::invalid_argument("RngState::next_uniform: requires hi > lo");
        }
        return lo + (hi - lo) * next_uniform();
    }

    /// Box-Muller cosine branch; consumes two uniforms.
    double next_gaussian(double mean = 0.0, double stddev = 1.0) {
        if (!(stddev > 0.0)) {
            throw std::invalid_argument("RngState::next_gaussian: requires stddev > 0");
        }
        const double u1 = 1.0 - next_uniform();  // (0,1], keeps log finite
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, n).
    std::size_t next_index(std::size_t n) {
        if (n == 0) {
            throw std::invalid_argument("RngState::next_index: empty range");
        }
        // Multiply-shift; bias is < 2^-53 for any n this library ever uses.
        return static_cast<std::size_t>(next_uniform() * static_cast<double>(n));
    }

    std::vector<double> uniform_vector(double lo, double hi, std::size_t n) {
        if (!(hi > lo)) {
            throw std::invalid_argument("RngState::uniform_vector: requires hi > lo");
        }
        std::vector<double> out(n);
        for (double& v : out) v = lo + (hi - lo) * next_uniform();
        return out;
    }

    std::vector<double> gaussian_vector(double mean, double stddev, std::size_t n) {
        if (!(stddev > 0.0)) {
            throw std::invalid_argument("RngState::gaussian_vector: requires stddev > 0");
        }
        std::vector<double> out(n);
        for (double& v : out) v = next_gaussian(mean, stddev);
        return out;
    }

    /// Independent child stream, seeded from this stream's next word.
    RngState split() { return RngState(next_u64()); }

private:
    std::uint64_t seed_ = 0;
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace ganlab
