///
/// \file random.hpp
///
/// Seeded, splittable random streams for the Monte Carlo simulator.
///
/// Stream (seed, id) is a SplitMix64 sequence whose starting state is
///
///     start = mix64(mix64(seed) + id * 0xD1B54A32D192ED03)
///
/// and whose k-th output (k = 1, 2, ...) is mix64(start + k * 0x9E3779B97F4A7C15),
/// with mix64 the SplitMix64 finalizer. The simulator uses id = trial index,
/// so a trial draws the same numbers no matter which shard runs it. This
/// mapping is part of the reproducibility contract; changing it changes every
/// Monte Carlo result.
///
#ifndef IRS_HARQ_RANDOM_HPP
#define IRS_HARQ_RANDOM_HPP

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace irs_harq
{

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class CounterStream
{
public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t weyl_increment = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t stream_stride  = 0xD1B54A32D192ED03ULL;

    constexpr CounterStream(std::uint64_t seed, std::uint64_t id) noexcept
        : state_(mix64(mix64(seed) + id * stream_stride))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept
    {
        state_ += weyl_increment;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

/// A generator producing full-range 64-bit words.
template <class G>
concept bit_source64 = std::uniform_random_bit_generator<G> &&
                       std::same_as<typename G::result_type, std::uint64_t> &&
                       (G::min() == 0) &&
                       (G::max() == std::numeric_limits<std::uint64_t>::max());

/// Uniform on (0, 1] with 53-bit resolution; an all-ones word maps to 1.
template <bit_source64 G>
double uniform_open_closed(G& gen)
{
    constexpr double scale = 0x1.0p-53;
    return static_cast<double>((gen() >> 11) + 1) * scale;
}

/// Standard normal by Box-Muller, two uniforms per draw (cosine branch).
template <bit_source64 G>
double standard_normal(G& gen)
{
    const double u1 = uniform_open_closed(gen);
    const double u2 = uniform_open_closed(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace irs_harq

#endif // IRS_HARQ_RANDOM_HPP
