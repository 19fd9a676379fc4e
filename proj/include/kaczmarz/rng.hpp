#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace kaczmarz {

/// Portable random stream.
///
/// Bits come from std::mt19937_64 seeded with the raw 64-bit seed; the
/// engine's output sequence is fixed by the C++ standard. Uniform doubles take
/// the top 53 bits (u = (bits >> 11) * 2^-53, in [0,1)). Normals use the
/// Box-Muller transform on two uniforms, returning both values in turn. No
/// std::*_distribution is used because those differ across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_bits() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound). Uses rejection, so no modulo bias.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal.
    double normal();

    std::vector<double> normal_vector(std::size_t n);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Derives an independent stream seed from a base seed and a stream tag
/// (SplitMix64 finalizer on seed ^ tag).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

} // namespace kaczmarz
