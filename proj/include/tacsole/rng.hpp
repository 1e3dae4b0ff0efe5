#pragma once

#include <cstdint>
#include <random>

namespace tacsole {

// All seeded randomness in the library goes through one engine type so a
// (config, seed) pair pins every run bit-for-bit on a given build.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double uniform(Rng& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

inline double gaussian(Rng& rng, double mean, double sigma)
{
    std::normal_distribution<double> dist(mean, sigma);
    return dist(rng);
}

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    std::uniform_int_distribution<std::int64_t> dist(lo, hi);
    return dist(rng);
}

} // namespace tacsole
