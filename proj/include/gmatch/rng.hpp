#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gmatch {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and up to three
/// salts (graph index, view index, epoch, ...). Pure function of its inputs.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a = 0,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = seed;
    splitmix64(s);
    s ^= 0x632be59bd9b4e019ULL + a;
    splitmix64(s);
    s ^= 0x9e6c63d0876a9a47ULL + b;
    splitmix64(s);
    s ^= 0xc2b2ae3d27d4eb4fULL + c;
    return splitmix64(s);
}

/// Deterministic RNG: mt19937_64 (fully specified by the standard) with
/// hand-rolled value mappings, so every platform replays identically.
/// std::uniform_*_distribution is implementation-defined and never used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Rejection sampling, bias-free.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t zone = UINT64_MAX - UINT64_MAX % un;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= zone);
        return static_cast<std::size_t>(x % un);
    }

    /// Standard normal via Box-Muller (no caching; two uniforms per draw).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gmatch
