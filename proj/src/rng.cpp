#include "sinlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace sinlab {

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
    if (n == 0) throw ParameterError("uniform_below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double std, Rng& rng) {
    if (!(std > 0.0) || !std::isfinite(std)) {
        throw ParameterError("gaussian_matrix: std must be positive and finite");
    }
    Matrix m(rows, cols);
    for (double& v : m.data()) v = std * rng.normal();
    return m;
}

}  // namespace sinlab
