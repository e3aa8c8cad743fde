#pragma once

#include <cstdint>
#include <random>

namespace raf {

// splitmix64; used to spread seeds before feeding them to mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed for the index-th substream of a master seed. Substreams are
// independent of how many workers consume them, which is what makes
// parallel sampling reproducible.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index) {
    return std::mt19937_64(stream_seed(master, index));
}

// Uniform double in [0,1) built from the top 53 bits of the generator
// output. Avoids std::uniform_real_distribution, whose output is not
// pinned down by the standard.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Unbiased-enough bounded draw via 128-bit multiply-shift.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen()) * n) >> 64);
}

} // namespace raf
