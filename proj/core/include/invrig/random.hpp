#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "invrig/mesh.hpp"

namespace invrig {

using Rng = std::mt19937_64;

/// Derives an independent seed for sub-stream `stream` of `base` (splitmix64
/// finalizer), e.g. one per frame.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Uniform integer in [0, bound) by rejection sampling. Unlike
/// std::uniform_int_distribution the result depends only on the engine
/// output, so sequences are identical across standard libraries.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform_unit(Rng& rng);

/// Fisher-Yates shuffle driven by uniform_below.
void shuffle(std::span<Index> values, Rng& rng);

}  // namespace invrig
