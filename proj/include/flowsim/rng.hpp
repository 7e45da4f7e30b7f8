#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace flowsim {

// Seeded generator with portable, bit-stable transforms. All randomness in the
// project flows through this class so that a (config, seed) pair reproduces a
// workload exactly, independent of the standard library's distribution
// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    // Inverse-CDF exponential sample, strictly positive.
    double exponential(double mean) {
        double u = uniform01();
        while (u == 0.0) u = uniform01();
        return -mean * std::log1p(-u);
    }

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace flowsim
