#pragma once

#include <cstdint>
#include <random>

namespace mlsbm {

// All randomness in the library flows through Rng below, which is fully
// deterministic for a given seed across platforms and standard libraries:
//
//  * raw 64-bit words come from std::mt19937_64, whose output sequence is
//    pinned by the C++ standard;
//  * real-valued draws use the explicit transform (x >> 11) * 2^-53, i.e. the
//    top 53 bits mapped to [0,1), instead of std::uniform_real_distribution
//    (whose stream is implementation-defined);
//  * bounded integer draws use rejection sampling on the raw words.
//
// Seed derivation for replicated experiments uses splitmix64, the finalizer
// from Steele/Lea/Flood "Fast splittable pseudorandom number generators":
// replicate_seed = splitmix64(splitmix64(splitmix64(seed) ^ grid_index) ^ rep).

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0,1) with 53-bit resolution.
    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    bool bernoulli(double p) { return u01() < p; }

    // Uniform on {0, ..., n-1}; unbiased via rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller on the explicit u01 stream.
    double normal() {
        double u1 = u01();
        while (u1 <= 0.0) u1 = u01();
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace mlsbm
