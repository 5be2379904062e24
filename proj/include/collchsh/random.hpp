#pragma once

// Deterministic seeding helpers. Restart substreams are derived from a master
// seed by counter hashing, so stream k is the same regardless of how many
// streams a run uses or which thread evaluates it.

#include <cstdint>
#include <random>

namespace collchsh {

// splitmix64 step; good enough as a seed scrambler and stateless hash.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

}  // namespace collchsh
