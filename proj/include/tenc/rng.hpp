#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tenc {

/// Seeded random source with distributions implemented in-library so that
/// streams are identical across standard-library implementations. All
/// randomness in the project flows through this type.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection sampling keeps the stream platform-stable and unbiased.
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % n;
    }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Derives an independent child stream; used to keep corpus sampling,
    /// model seeding, etc. decoupled while still a pure function of the
    /// master seed.
    Rng child(std::uint64_t stream_tag) {
        std::uint64_t mixed = engine_() ^ (stream_tag * 0x9e3779b97f4a7c15ULL);
        return Rng(mixed);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tenc
