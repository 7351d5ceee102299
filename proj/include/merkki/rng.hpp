#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>

namespace merkki {

// Seeded generator with platform-independent derived distributions. The
// std:: distribution classes are implementation-defined, so only the raw
// mt19937_64 stream (which is fully specified) is used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // splitmix64 finaliser; used to derive independent per-stream seeds.
    static constexpr std::uint64_t mix(std::uint64_t x) noexcept {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept {
        return mix(seed ^ mix(stream + 1));
    }

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, n); n must be > 0. Rejection sampling, no modulo bias.
    std::size_t uniform_index(std::size_t n) {
        const auto bound = static_cast<std::uint64_t>(n);
        const auto limit = std::numeric_limits<std::uint64_t>::max() -
                           std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x = next();
        while (x >= limit) {
            x = next();
        }
        return static_cast<std::size_t>(x % bound);
    }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) {
        if (p <= 0.0) {
            return false;
        }
        if (p >= 1.0) {
            return true;
        }
        return uniform01() < p;
    }

    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace merkki
