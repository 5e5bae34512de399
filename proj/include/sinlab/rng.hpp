#pragma once

#include <cstdint>
#include <random>

#include "sinlab/matrix.hpp"

namespace sinlab {

/// Deterministic random source. The normal/uniform conversions are
/// hand-rolled on top of mt19937_64 so that a given seed yields the same
/// bit stream on every platform (std::normal_distribution is
/// implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal deviate via Box-Muller; the second value of each
    /// pair is cached.
    double normal();

    /// Uniform integer in [0, n); rejection sampling, unbiased.
    std::uint64_t uniform_below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// rows x cols matrix of i.i.d. N(0, std^2) draws from rng, row-major fill
/// order. Same seed, same matrix, bit for bit.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double std, Rng& rng);

}  // namespace sinlab
