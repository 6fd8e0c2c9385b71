#pragma once

#include <cstdint>
#include <random>

namespace cgoslab {

// Deterministic uniform generator: fixed 53-bit mantissa construction on top
// of mt19937_64 so streams are reproducible across standard libraries
// (std::uniform_real_distribution is not pinned by the standard).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}
