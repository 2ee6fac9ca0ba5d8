#pragma once

#include <cstdint>
#include <cmath>

#include "lamlab/util.hpp"

namespace lamlab {

/// Counter-based deterministic random stream. The sequence depends only on
/// (seed, index); distinct indices give statistically independent streams,
/// so parallel or reordered consumers always see the same numbers.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t index)
        : state_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(index + 0xbf58476d1ce4e5b9ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform on [0,1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo,hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform on the closed disc of given center/radius (area measure).
    Complex next_in_disc(Complex center, double radius) {
        const double r = radius * std::sqrt(next_double());
        const double t = 2.0 * kPi * next_double();
        return center + Complex(r * std::cos(t), r * std::sin(t));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace lamlab
