#pragma once

// Simulation random streams. Every trial gets its own generator derived from
// (master seed, point index, trial index) so results do not depend on how
// trials are scheduled across workers.

#include "types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace ofdmsec {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng derive_rng(std::uint64_t master, std::uint64_t point, std::uint64_t trial, std::uint64_t salt = 0)
{
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ point);
    h = splitmix64(h ^ (trial * 0xd1b54a32d192ed03ULL));
    h = splitmix64(h ^ salt);
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return Rng(seq);
}

// Circular complex Gaussian with E|g|^2 = variance.
inline Complex complex_gaussian(Rng& rng, double variance)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

inline Bits random_bits(Rng& rng, std::size_t count)
{
    Bits b(count);
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& v : b) v = static_cast<std::uint8_t>(bit(rng));
    return b;
}

} // namespace ofdmsec
