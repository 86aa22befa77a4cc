#include "xorhalf/rng.hpp"

#include <limits>

namespace xorhalf {

std::uint64_t mix64(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(tag));
    return mix64(h ^ mix64(index));
}

std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    // rejection sampling on the top of the range
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = eng();
    while (x >= limit) x = eng();
    return x % bound;
}

}  // namespace xorhalf
