///
/// \file random.hpp
///
/// Portable seeded random streams.
///
/// The standard library leaves the algorithms behind `std::normal_distribution`
/// and `std::gamma_distribution` unspecified, so two toolchains produce
/// different draws from the same engine state. `Rng` builds its variates on
/// top of `std::mt19937_64` (whose output sequence is fully specified) with
/// fixed algorithms, so a seed names the same experiment everywhere.
///
#pragma once

#include <cstdint>
#include <random>

#include <hankelmc/types.hpp>

namespace hankelmc
{

/// SplitMix64 finalizer; a bijective 64-bit mix.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

///
/// Per-trial seed derived from a master seed:
///
///   seed = mix(mix(mix(master) ^ cell) ^ trial)
///
/// where `mix` is `splitmix64`. Independent of execution order.
///
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                    std::uint64_t trial) noexcept
{
    return splitmix64(splitmix64(splitmix64(master) ^ cell) ^ trial);
}

class Rng
{
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on the open interval (0, 1).
    double uniform_open();

    /// Uniform integer in [0, n) without modulo bias.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal (Marsaglia polar method).
    double normal();

    /// Circular complex Gaussian with E|z|^2 = 1.
    Complex complex_normal();

    /// Gamma(shape, scale) via Marsaglia-Tsang; shape < 1 handled by the
    /// U^(1/shape) boost.
    double gamma(double shape, double scale);

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_      = false;
};

} // namespace hankelmc
