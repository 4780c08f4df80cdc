#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "colorgrid/rng.hpp"
#include "colorgrid/types.hpp"

namespace colorgrid {

inline constexpr std::int8_t kEmpty = -1;

/// Full world state of one environment instance.
///
/// `cells` is row-major; each entry is kEmpty or a color index. Agents are
/// stored separately (leaders first) and never share a cell with a block.
struct GridState {
  int width = 0;
  int height = 0;
  std::vector<std::int8_t> cells;
  std::vector<Cell> agents;
  BlockColor goal;
  std::uint64_t timestep = 0;
  std::array<int, kNumColors> color_counts{};
  RngStreams rng;

  bool in_bounds(Cell c) const noexcept {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }
  int index(Cell c) const noexcept { return c.row * width + c.col; }
  Cell cell_at(int idx) const noexcept { return {idx / width, idx % width}; }

  std::int8_t block_at(Cell c) const noexcept { return cells[index(c)]; }
  bool has_block(Cell c) const noexcept { return block_at(c) != kEmpty; }

  /// Index of the agent standing on `c`, or -1.
  int agent_at(Cell c) const noexcept {
    for (std::size_t i = 0; i < agents.size(); ++i)
      if (agents[i] == c) return static_cast<int>(i);
    return -1;
  }

  bool is_empty(Cell c) const noexcept { return !has_block(c) && agent_at(c) < 0; }

  int count_color(BlockColor color) const noexcept {
    return static_cast<int>(std::count(cells.begin(), cells.end(), static_cast<std::int8_t>(color.index)));
  }

  friend bool operator==(const GridState&, const GridState&) = default;
};

/// 64-bit FNV-1a over the observable state (cells, agents, goal, timestep).
/// Stable across platforms; used for trajectory and replay checks.
inline std::uint64_t state_hash(const GridState& s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto mix = [&h](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      h ^= (v >> (8 * i)) & 0xFFu;
      h *= 0x100000001B3ull;
    }
  };
  mix(static_cast<std::uint32_t>(s.width), 4);
  mix(static_cast<std::uint32_t>(s.height), 4);
  for (auto c : s.cells) mix(static_cast<std::uint8_t>(c), 1);
  for (auto a : s.agents) {
    mix(static_cast<std::uint32_t>(a.row), 4);
    mix(static_cast<std::uint32_t>(a.col), 4);
  }
  mix(s.goal.index, 1);
  mix(s.timestep, 8);
  return h;
}

}  // namespace colorgrid
