#include "ratiomarket/random.hpp"

namespace ratiomarket {

CounterStream CounterStream::for_substream(std::uint64_t master_seed, std::uint64_t index) noexcept {
    // Two rounds so that neighbouring (seed, index) pairs land far apart.
    const std::uint64_t h = mix64(master_seed ^ 0x6a09e667f3bcc909ULL);
    return CounterStream(mix64(h + mix64(index + kGamma)));
}

double CounterStream::uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterStream::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
}

std::uint64_t CounterStream::below(std::uint64_t bound) noexcept {
    __uint128_t m = static_cast<__uint128_t>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<__uint128_t>((*this)()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace ratiomarket
