#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bletwin::detail {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Mix independent stream identifiers into one seed. Used to derive per-packet /
/// per-stage RNG streams so parallel execution order cannot change results.
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
    uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0x517CC1B727220A95ull * (a + 1);
    (void)splitmix64(s);
    s ^= 0x2545F4914F6CDD1Dull * (b + 1);
    (void)splitmix64(s);
    return s;
}

/// Deterministic, implementation-independent generator (xoshiro256++ seeded via
/// splitmix64) with Box-Muller gaussians. std::normal_distribution is not pinned
/// down by the standard, so we keep the whole stream under our control.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in (0, 1]: never returns 0, so log() below is safe.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    uint32_t bit() { return static_cast<uint32_t>(next_u64() >> 63); }

    uint64_t below(uint64_t n) { return next_u64() % n; }

    /// One standard normal sample (Box-Muller, pair cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace bletwin::detail
