#pragma once

// Deterministic random numbers and transcendental functions for the simulator.
//
// The generator is xoshiro256** (Blackman & Vigna), seeded through SplitMix64.
// Normals use the Marsaglia polar method. exp and log are evaluated with
// Cody-Waite argument reduction and fixed polynomials built only from IEEE-754
// basic operations, frexp and ldexp, so results do not depend on the platform
// libm. Together with -ffp-contract=off this makes simulated tapes
// bit-reproducible across compilers and platforms.

#include <array>
#include <cstdint>

namespace mbv::detmath {

double exp(double x) noexcept;
double log(double x) noexcept;

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
    std::uint64_t next() noexcept;

private:
    std::uint64_t state_;
};

class Xoshiro256StarStar {
public:
    /// Independent stream `stream` of the generator family rooted at `seed`.
    Xoshiro256StarStar(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal draw (polar method; caches the second variate).
    double normal() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mbv::detmath
