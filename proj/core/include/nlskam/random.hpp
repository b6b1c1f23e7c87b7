#pragma once

#include <cstdint>

namespace nlskam
{

// Counter-based generator: the value for (seed, stream, index) is a pure
// function of its arguments, so parallel consumers never share state and
// results do not depend on scheduling.
class CounterRng
{
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const
    {
        std::uint64_t x = mix(seed_ ^ mix(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
        return mix(x + index * 0xbf58476d1ce4e5b9ULL);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t index) const
    {
        return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t stream, std::uint64_t index, double lo, double hi) const
    {
        return lo + (hi - lo) * uniform(stream, index);
    }

private:
    // splitmix64 finaliser
    static std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

} // namespace nlskam
