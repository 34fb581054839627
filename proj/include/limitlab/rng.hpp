#pragma once

#include <complex>
#include <cstdint>

namespace limitlab {

/// Small deterministic PRNG (splitmix64). All randomness in the library flows
/// through this so that a fixed seed reproduces runs bit-for-bit on every
/// platform; std::uniform_real_distribution makes no such promise.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// uniform in [0,1), 53-bit resolution
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// uniform integer in [0,n)
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    std::complex<double> in_disk(double radius) {
        // rejection keeps the distribution honest; at most a few draws
        for (;;) {
            double x = uniform(-1.0, 1.0), y = uniform(-1.0, 1.0);
            if (x * x + y * y <= 1.0) return {radius * x, radius * y};
        }
    }

    std::complex<double> on_circle() {
        double t = next_double();
        return std::polar(1.0, 2.0 * 3.14159265358979323846 * t);
    }

private:
    std::uint64_t state_;
};

} // namespace limitlab
