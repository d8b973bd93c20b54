#pragma once

#include <cstdint>
#include <random>

namespace gerve {

using Rng = std::mt19937_64;

// splitmix64 finaliser; used to derive independent child seeds from a root.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for stream `stream`, item `index` under `root`. Independent of the order in
// which items are evaluated, so parallel runs reproduce sequential ones.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                    std::uint64_t index = 0) {
  return mix_seed(mix_seed(root ^ mix_seed(stream)) ^ mix_seed(index + 0x51ed27f3ULL));
}

// Named streams so different consumers of one root seed never collide.
namespace stream {
inline constexpr std::uint64_t kBatch = 1;
inline constexpr std::uint64_t kEntropy = 2;
inline constexpr std::uint64_t kInit = 3;
inline constexpr std::uint64_t kResample = 4;
inline constexpr std::uint64_t kReplicate = 5;
inline constexpr std::uint64_t kData = 6;
inline constexpr std::uint64_t kPadding = 7;
inline constexpr std::uint64_t kCell = 8;
inline constexpr std::uint64_t kOutsideMass = 9;
}  // namespace stream

}  // namespace gerve
