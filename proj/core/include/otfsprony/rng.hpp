#ifndef OTFSPRONY_RNG_HPP
#define OTFSPRONY_RNG_HPP

#include <cstdint>
#include <random>

namespace otfsprony
{

using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

///
/// Seed of stream `index` under `master`: the SplitMix64 output at counter
/// position `index` of a generator seeded with `splitmix64(master)`.
/// Streams are independent of the order in which they are requested.
///
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(master) + index * 0x9e3779b97f4a7c15ULL);
}

} // namespace otfsprony

#endif
