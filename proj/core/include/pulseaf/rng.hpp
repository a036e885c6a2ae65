#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pulseaf {

// Deterministic random source. mt19937_64 has a standardized output
// sequence; the distribution transforms below are spelled out explicitly
// instead of using std::*_distribution, whose algorithms vary between
// standard libraries. Same seed -> same stream, everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller. Caches the second deviate; no rejection loop, so the
    // number of engine draws per call is fixed.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // Guard log(0).
        while (u1 <= 0.0) u1 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// splitmix64; used to derive independent per-subject and per-record seeds
// from one cohort seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return mix_seed(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2) + mix_seed(b)));
}

} // namespace pulseaf
