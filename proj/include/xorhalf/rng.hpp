#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace xorhalf {

using Engine = std::mt19937_64;

// Stream tags: one per consumer so that streams never collide.
enum class StreamTag : std::uint64_t {
    RandomTuple = 1,
    PlantedAssignment,
    PlantedTuple,
    PlantedNoise,
    Step1Partition,
    Step2Coin,
    Perceptron,
    Bootstrap,
    SqAdversary,
    SqGenerator,
    Pipeline,
    Fixture,
    Experiment,
};

std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for the `index`-th stream of kind `tag` under `seed`.
///
/// Per-index streams make generation independent of evaluation order.
std::uint64_t stream_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) noexcept;

inline Engine make_engine(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
    return Engine(stream_seed(seed, tag, index));
}

/// Uniform integer in [0, bound). std::uniform_int_distribution is
/// implementation-defined; this one pins generated bytes across toolchains.
std::uint64_t uniform_below(Engine& eng, std::uint64_t bound);

inline bool fair_coin(Engine& eng) { return (eng() >> 63) != 0; }

}  // namespace xorhalf
