#pragma once

#include <cstdint>
#include <random>

namespace treerules {

using Rng = std::mt19937_64;

// Independent child seed for stream `stream` of a run seeded with `seed`
// (splitmix64 finalizer), so per-tree and per-run generators do not depend
// on scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace treerules
