// Deterministic random number utilities.
//
// All randomness in the project flows through these helpers so that results
// are reproducible bit-for-bit across platforms. std::mt19937_64 has a
// portable sequence, but the std distributions do not, so the usual
// distribution adapters are reimplemented here from the raw 64-bit stream.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace heatprop {

using Rng = std::mt19937_64;

// splitmix64 step, used to derive independent child seeds from a master
// seed without correlations between adjacent seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Mixes a master seed with stream identifiers (trial index, purpose tag)
// into one child seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= 0x517cc1b727220a95ULL * (a + 1);
    (void)splitmix64(s);
    s ^= 0x2545f4914f6cdd1dULL * (b + 1);
    return splitmix64(s);
}

// Uniform double in [0, 1), 53-bit resolution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Standard normal via Box-Muller. One value per call keeps the stream
// layout obvious; the discarded pair member is not worth caching here.
inline double normal01(Rng& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Fisher-Yates shuffle over indices 0..n-1.
inline std::vector<int> shuffled_indices(Rng& rng, int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(i) + 1));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

} // namespace heatprop
