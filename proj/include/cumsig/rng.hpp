// Deterministic random-variate generation.
//
// std::mt19937_64 supplies raw 64-bit words; uniforms and normals are derived
// here by fixed arithmetic (53-bit mantissa scaling, Box-Muller) instead of
// the stdlib distributions, whose output is implementation-defined. This keeps
// every simulation byte-identical across toolchains, which the reporting
// pipeline depends on.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "cumsig/types.hpp"

namespace cumsig {

// splitmix64 step: the finalizer used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Named, versioned seed-mixing function recorded in run provenance:
// "splitmix64-v1". Folds each word into the state and finalizes.
inline constexpr const char* kSeedMixName = "splitmix64-v1";

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= a;
    return splitmix64(s);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a,
                              std::uint64_t b) {
    return mix_seed(mix_seed(master, a), b);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; generates pairs, caches the second.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        double t = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Circularly-symmetric complex normal with E|z|^2 = 1.
    cplx cnormal() {
        double re = normal();
        double im = normal();
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace cumsig
