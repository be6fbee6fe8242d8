#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sldisco {

// Counter-based pseudo-random generator (SplitMix64 stream). The k-th output
// is a pure function of (key, k), so derived streams can be replayed from any
// point and parallel producers drawing from disjoint streams are reproducible
// regardless of scheduling. All floating-point draws are built from the raw
// 64-bit stream with explicit arithmetic, never through std:: distributions,
// so sequences are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(seed) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return mix64(key_ + counter_);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe to feed into log().
    double uniform01_open0() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Fixed-point multiply; bias is O(n / 2^64).
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double prob) { return uniform01() < prob; }

    // Standard normal via Box-Muller; one draw consumes two words so each
    // call is independent of call history.
    double normal() {
        const double u1 = uniform01_open0();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stable sub-seed for stream `stream` of a master seed. Used to give every
// corpus item / benchmark cell its own generator.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return Rng::mix64(seed ^ Rng::mix64(stream + 0xD1B54A32D192ED03ULL));
}

}  // namespace sldisco
