#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace srcrt {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: draw k of stream `key` is mix64(key + k * phi).
/// Streams for (seed, trial) pairs are derived with substream(), so a trial's
/// draws do not depend on which worker runs it or in what order.
///
/// Normals use the Box-Muller transform on two uniforms; uniforms take the top
/// 53 bits of a draw.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static CounterRng substream(std::uint64_t seed, std::uint64_t index)
    {
        return CounterRng(mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t next_u64()
    {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi)
    {
        const double x = lo + (hi - lo) * uniform();
        return x < hi ? x : lo;
    }

    /// Standard normal.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Uniform integer in [0, bound), bound > 0, by rejection.
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::span<T> values)
    {
        for (std::size_t k = values.size(); k > 1; --k) {
            const auto j = static_cast<std::size_t>(below(k));
            std::swap(values[k - 1], values[j]);
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace srcrt
