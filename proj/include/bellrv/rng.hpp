#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bellrv {

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based stream: the draws for sample `index` are a pure function of
/// (seed, index), so samples can be generated in any order or partition.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t index)
        : state_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)))
    {
    }

    std::uint64_t next()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal pair by Box-Muller.
    void gaussian_pair(double& g0, double& g1)
    {
        const double u = 1.0 - uniform();  // (0, 1]
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        g0 = r * std::cos(2.0 * std::numbers::pi * v);
        g1 = r * std::sin(2.0 * std::numbers::pi * v);
    }

private:
    std::uint64_t state_;
};

}  // namespace bellrv
