#pragma once

#include <cstdint>

namespace maxpoly {

// Stateless counter-based generator: every draw is a pure function of
// (key, stream, counter), so results do not depend on call order or threads.
// Mixing is three rounds of the SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint64_t stream, std::uint64_t counter) noexcept
{
    return splitmix64(splitmix64(splitmix64(key) ^ stream) ^ counter);
}

// Uniform double in [0, 1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t key, std::uint64_t stream, std::uint64_t counter) noexcept
{
    return static_cast<double>(counter_hash(key, stream, counter) >> 11) * 0x1.0p-53;
}

// Sequential convenience wrapper over the counter construction.
class CounterRng {
public:
    CounterRng(std::uint64_t key, std::uint64_t stream) noexcept : key_(key), stream_(stream) {}

    double uniform() noexcept { return counter_uniform(key_, stream_, counter_++); }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    std::uint64_t next_u64() noexcept { return counter_hash(key_, stream_, counter_++); }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace maxpoly
