#pragma once

#include <cstdint>
#include <random>

namespace colorgrid {

// Bit mixer used to expand one user seed into independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives a child seed from a parent seed and a stream/index tag.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept {
  return splitmix64(parent ^ splitmix64(tag + 0x632BE59BD9B4E019ull));
}

using Engine = std::mt19937_64;

// The standard distributions are implementation-defined, so bounded draws are
// done here to keep trajectories identical across toolchains.

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = eng();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = eng();
      m = static_cast<unsigned __int128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 bits of precision.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Named generator streams owned by one environment instance.
struct RngStreams {
  Engine placement;
  Engine respawn;
  Engine goal;

  RngStreams() = default;
  explicit RngStreams(std::uint64_t seed)
      : placement(derive_seed(seed, 1)),
        respawn(derive_seed(seed, 2)),
        goal(derive_seed(seed, 3)) {}

  friend bool operator==(const RngStreams&, const RngStreams&) = default;
};

}  // namespace colorgrid
