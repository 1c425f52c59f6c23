#pragma once

#include <cstdint>
#include <string_view>

namespace astroturf {

/// Deterministic 64-bit PRNG (splitmix64). The standard <random> engines are
/// portable but their distributions are not; every draw here is defined in
/// terms of raw 64-bit output so results are identical on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform integer in [0, n). n must be > 0; modulo bias is negligible
    /// for the ranges used here.
    std::uint64_t below(std::uint64_t n) {
        return next_u64() % n;
    }

    bool chance(double p) {
        return uniform01() < p;
    }

    /// Independent child stream. Mixing a label keeps sibling streams
    /// (per-tree, per-trend, per-day) decoupled from draw order.
    Rng fork(std::uint64_t label) {
        std::uint64_t mixed = state_ ^ (label * 0xd6e8feb86659fd93ULL + 0x2545f4914f6cdd1dULL);
        return Rng(mixed);
    }

private:
    std::uint64_t state_;
};

/// FNV-1a, used to hash strings into stream labels and to fingerprint files.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace astroturf
