#pragma once

#include <cstdint>
#include <random>

namespace spotvol {

/// splitmix64 finalizer; decorrelates structured seed inputs.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic per-cell seed for campaign cell (n, replicate).
inline std::uint64_t cell_seed(std::uint64_t base, std::uint64_t n,
                               std::uint64_t replicate) {
  return splitmix64(base ^ splitmix64(n) ^ splitmix64(~replicate));
}

using Rng = std::mt19937_64;

}  // namespace spotvol
