#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace roughspec::rng {

// Every random stream in the library is an mt19937_64 seeded through
// splitmix64(seed) ^ splitmix64(stream_id + golden). Uniform doubles use the
// top 53 bits of one draw, so sequences are identical across standard
// libraries (std::uniform_real_distribution is not).
inline constexpr std::string_view kGeneratorName = "mt19937_64+splitmix64-streams";

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Independent stream `stream_id` derived from a top-level seed.
Engine stream(std::uint64_t seed, std::uint64_t stream_id);

/// Seed for a named stage, e.g. derive(seed, 3) for dataset index 3.
std::uint64_t derive(std::uint64_t seed, std::uint64_t salt);

/// Uniform in [0, 1).
double uniform01(Engine& eng);

/// Uniform in [lo, hi]; returns lo when lo == hi.
double uniform(Engine& eng, double lo, double hi);

/// Index drawn with probability proportional to weights (all >= 0, sum > 0).
std::size_t categorical(Engine& eng, std::span<const double> weights);

}  // namespace roughspec::rng
