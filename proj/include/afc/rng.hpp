#pragma once

#include <cstdint>
#include <random>

namespace afc {

// Deterministic uniform generator. std::uniform_real_distribution is
// implementation-defined, so byte-identical output across standard libraries
// requires mapping the raw engine output to [0,1) ourselves.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0,1) with 53 random bits.
    double next01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next(double lo, double hi) { return lo + (hi - lo) * next01(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace afc
