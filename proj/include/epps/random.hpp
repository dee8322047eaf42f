#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace epps
{

using Engine = std::mt19937_64;

/// Independent random streams carved out of one simulation seed.
enum class Stream : std::uint64_t
{
    diffusion = 1,
    jumps = 2,
    subordinator = 3,
    variance = 4,
    decimation = 5,
    arrivals = 6,
    volumes = 7,
};

/// SplitMix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * @brief Child seed from a parent seed and a path of integer labels.
 *
 * Each label is folded in with one SplitMix64 round, so (seed, labels...)
 * names a stream independently of how many other streams exist. Experiment
 * replications use (seed, grid point, replication).
 */
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> labels) noexcept
{
    std::uint64_t h = splitmix64(parent);
    for (auto label : labels)
        h = splitmix64(h ^ splitmix64(label + 0x632be59bd9b4e019ULL));
    return h;
}

inline Engine make_engine(std::uint64_t seed, Stream stream)
{
    return Engine(derive_seed(seed, {static_cast<std::uint64_t>(stream)}));
}

} // namespace epps
