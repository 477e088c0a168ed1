#pragma once

#include <cstdint>

#include "pathgrad/matrix.hpp"

namespace pathgrad {

/// Counter-based deterministic PRNG (splitmix64). The 64-bit integer and
/// uniform streams are bit-identical for a given seed on every platform;
/// gaussian draws additionally depend on the libm log/cos implementation.
/// Single-owner: one Rng must not be shared across concurrent draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit();

    /// Standard normal via Box-Muller; draws two uniforms per pair.
    double next_gaussian();

    /// Uniform integer in [0, bound); rejection sampling, no modulo bias.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::uint64_t state_;
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

/// Mixes a value into a seed; used to derive independent substreams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// rows x cols matrix of i.i.d. normal(mean, std) draws. std must be >= 0;
/// std = 0 yields a constant matrix and still consumes the same draws.
Matrix sample_gaussian(Rng& rng, std::size_t rows, std::size_t cols, double mean, double std_dev);

} // namespace pathgrad
