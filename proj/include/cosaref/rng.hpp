#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace cosaref {

/// Deterministic, platform-independent random stream (xoshiro-style
/// splitmix64 core, Box-Muller normals). All randomness in the pipeline
/// flows from one top-level seed through named substreams so components
/// reproduce independently.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    /// Derive an independent substream, e.g. Rng(seed).fork("chunk", i).
    Rng fork(std::string_view name, uint64_t index = 0) const {
        uint64_t h = state_;
        for (char c : name) h = mix(h ^ static_cast<uint64_t>(static_cast<unsigned char>(c)));
        h = mix(h ^ index);
        return Rng(h);
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    uint64_t uniform_int(uint64_t n) { return next_u64() % n; }

    /// Standard normal (Box-Muller; one value per call, cached pair).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

  private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace cosaref
