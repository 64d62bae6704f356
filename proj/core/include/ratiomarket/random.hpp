#pragma once

#include <cstdint>
#include <limits>

namespace ratiomarket {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based random stream.
///
/// Output i of the stream keyed by `key` is mix64(key + (i + 1) * gamma), so
/// any draw is a pure function of (key, counter). Streams for different
/// trajectories are obtained with `for_substream`, which hashes the master
/// seed and the substream index into a fresh key; no generator state is ever
/// shared between substreams. Satisfies UniformRandomBitGenerator.
class CounterStream {
public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    constexpr explicit CounterStream(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter) {}

    /// Stream for substream `index` under `master_seed`.
    [[nodiscard]] static CounterStream for_substream(std::uint64_t master_seed, std::uint64_t index) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * kGamma);
    }

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept;
    /// Uniform integer in [0, bound); bound must be positive. Unbiased (Lemire).
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace ratiomarket
