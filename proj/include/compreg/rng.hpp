#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace compreg {

/// SplitMix64 finaliser; used to derive independent seeds from (seed, stream).
std::uint64_t splitmix64(std::uint64_t value);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable generator: std::mt19937_64 (its output sequence is fixed by the
/// standard) with distribution transforms implemented here, since the
/// standard library's distributions are not reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Independent stream `stream` of a base seed.
    static Rng substream(std::uint64_t seed, std::uint64_t stream)
    {
        return Rng(derive_seed(seed, stream));
    }

    std::uint64_t next_u64() { return engine_(); }
    double uniform();      // [0, 1), 53 random bits
    double normal();       // N(0, 1), Marsaglia polar method
    double exponential(double rate = 1.0);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_normal_;
};

} // namespace compreg
