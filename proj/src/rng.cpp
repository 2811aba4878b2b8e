#include "roughspec/rng.hpp"

#include "roughspec/errors.hpp"

namespace roughspec::rng {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Engine stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Engine(splitmix64(seed) ^ splitmix64(stream_id + 0x9E3779B97F4A7C15ULL));
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(splitmix64(seed) + salt);
}

double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

std::size_t categorical(Engine& eng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (weights.empty() || !(total > 0.0)) {
    throw ValidationError("categorical: weights must be nonnegative with positive sum");
  }
  const double target = uniform01(eng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

}  // namespace roughspec::rng
