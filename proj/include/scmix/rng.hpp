#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "scmix/types.hpp"

namespace scmix::rng {

// Stream seeding contract: a (seed, domain, index) triple identifies one
// reproducible random stream. Different domains never alias even when they
// share (seed, index), so e.g. the profile draw and the Gaussian blocks of
// the same Monte-Carlo iteration are decorrelated.

enum class Domain : std::uint64_t {
    profile = 0x70726f66696c6531ull,
    block_matrix = 0x626c6f636b6d6174ull,
    clt_trial = 0x636c747472696c73ull,
    generic = 0x67656e6572696331ull,
};

/// splitmix64 finalizer; full-avalanche 64-bit mix.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t stream_seed(std::uint64_t seed, Domain domain,
                                           std::uint64_t index) {
    return mix64(mix64(seed ^ static_cast<std::uint64_t>(domain)) + index);
}

// ---------------------------------------------------------------------------
// Stream: a deterministic generator with explicitly specified transforms.
// mt19937_64 output is pinned by the standard; the distribution transforms
// are written out here so streams are bit-identical across standard library
// implementations too.
// ---------------------------------------------------------------------------

class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via Box-Muller; generates in pairs, caches the spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * kPi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Complex Gaussian with E|z|^2 = variance (independent Re/Im halves).
    cplx complex_normal(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = s * normal();
        const double im = s * normal();
        return cplx(re, im);
    }

    /// Rayleigh(sigma) via inverse CDF; mean sigma*sqrt(pi/2), second moment 2*sigma^2.
    double rayleigh(double sigma) {
        return sigma * std::sqrt(-2.0 * std::log(1.0 - uniform01()));
    }

    double exponential(double lambda) { return -std::log(1.0 - uniform01()) / lambda; }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace scmix::rng
