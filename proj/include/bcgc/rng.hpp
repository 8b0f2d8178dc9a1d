#ifndef BCGC_RNG_HPP
#define BCGC_RNG_HPP

#include <cstdint>
#include <random>

namespace bcgc {

// Every stochastic operation takes an explicit stream; there is no global RNG.
using RngStream = std::mt19937_64;

// splitmix64 step, used to derive independent stream seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix64(base ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
}

// Uniform in [0,1) with 53 random mantissa bits. Implemented by hand so that
// draws are bit-identical across standard libraries.
inline double uniform01(RngStream& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace bcgc

#endif
