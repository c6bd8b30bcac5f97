#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <random>

namespace ttsis {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits, so results do not
// depend on the standard library's distribution implementations.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection sampling.
inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
    const std::uint64_t range = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t draw = rng();
    while (draw >= limit)
        draw = rng();
    return static_cast<std::size_t>(draw % range);
}

// Exponential waiting time with the given rate.
inline double exponential(Rng& rng, double rate)
{
    return -std::log1p(-uniform01(rng)) / rate;
}

// Independent stream for the i-th task derived from a base seed.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

} // namespace ttsis
