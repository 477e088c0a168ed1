#include "pathgrad/rng.hpp"

#include <cmath>
#include <numbers>

#include "pathgrad/errors.hpp"

namespace pathgrad {

namespace {

std::uint64_t splitmix64_step(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t Rng::next_u64() { return splitmix64_step(state_); }

double Rng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
    if (has_cached_gaussian_) {
        has_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_gaussian_ = radius * std::sin(angle);
    has_cached_gaussian_ = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
    if (bound == 0) throw input_error("Rng::next_below: bound must be positive");
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t draw = next_u64();
    while (draw >= limit) draw = next_u64();
    return draw % bound;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t state = seed ^ (0xA0761D6478BD642FULL + salt * 0xE7037ED1A0B428DBULL);
    return splitmix64_step(state);
}

Matrix sample_gaussian(Rng& rng, std::size_t rows, std::size_t cols, double mean, double std_dev) {
    if (std_dev < 0.0) throw input_error("sample_gaussian: std must be >= 0");
    Matrix out(rows, cols);
    for (double& v : out.data()) {
        v = mean + std_dev * rng.next_gaussian();
    }
    return out;
}

} // namespace pathgrad
