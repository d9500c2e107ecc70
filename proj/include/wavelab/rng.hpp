#pragma once

#include <cstdint>
#include <random>

#include "wavelab/types.hpp"

namespace wavelab {

/// Deterministic random source. Backed by std::mt19937_64, whose output
/// sequence is fully specified by the standard, so a given seed produces the
/// same stream on every platform. Gaussian variates use an explicit
/// Box-Muller transform instead of std::normal_distribution (which is
/// implementation-defined).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal variate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite.
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Circular complex Gaussian with E|z|^2 = variance.
    cplx normal_complex(double variance) {
        const double s = std::sqrt(variance * 0.5);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

    BitStream bits(std::size_t n) {
        BitStream out(n);
        for (auto& b : out) b = bit();
        return out;
    }

    /// Deterministic child seed for a parallel worker or indexed substream.
    /// splitmix64 finalizer over (seed, index); avalanche keeps substreams
    /// decorrelated even for adjacent indices.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace wavelab
