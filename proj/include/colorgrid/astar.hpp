#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

#include "colorgrid/types.hpp"

namespace colorgrid {

/// Dense per-cell mask for a width x height grid, row-major.
struct GridMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  GridMask() = default;
  GridMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool in_bounds(Cell c) const noexcept {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }
  bool test(Cell c) const noexcept { return bits[static_cast<std::size_t>(c.row) * width + c.col] != 0; }
  void set(Cell c, bool v = true) noexcept {
    bits[static_cast<std::size_t>(c.row) * width + c.col] = v ? 1 : 0;
  }
};

/// Cells from start to the reached target, both inclusive.
struct Path {
  std::vector<Cell> cells;

  int length() const noexcept { return static_cast<int>(cells.size()) - 1; }
  Cell target() const noexcept { return cells.back(); }
};

/// Shortest 4-connected path from `start` to any cell in `targets` that
/// avoids `obstacles` (obstacles win over targets).
///
/// The heuristic is Manhattan distance to the nearest target, which is
/// consistent, so the returned length is optimal. The frontier is ordered by
/// (f, row, col). Among all targets at the optimal distance the one first in
/// (row, col) scan order is returned; to find it the search keeps expanding
/// every node with f equal to the optimal length before stopping.
inline std::optional<Path> astar_path(int width, int height, Cell start, std::span<const Cell> targets,
                                      const GridMask& obstacles) {
  GridMask is_target(width, height);
  std::vector<Cell> live_targets;
  for (Cell t : targets)
    if (is_target.in_bounds(t) && !obstacles.test(t) && !is_target.test(t)) {
      is_target.set(t);
      live_targets.push_back(t);
    }
  if (live_targets.empty() || !is_target.in_bounds(start)) return std::nullopt;

  const auto n = static_cast<std::size_t>(width) * height;
  constexpr int kUnseen = std::numeric_limits<int>::max();
  std::vector<int> g(n, kUnseen);
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  auto idx = [width](Cell c) { return static_cast<std::size_t>(c.row) * width + c.col; };
  auto heuristic = [&live_targets](Cell c) {
    int best = kUnseen;
    for (Cell t : live_targets) best = std::min(best, manhattan(c, t));
    return best;
  };

  using Entry = std::tuple<int, int, int>;  // f, row, col
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[idx(start)] = 0;
  open.emplace(heuristic(start), start.row, start.col);

  int best_len = kUnseen;
  std::optional<Cell> best_target;
  while (!open.empty()) {
    const auto [f, row, col] = open.top();
    if (f > best_len) break;
    open.pop();
    const Cell c{row, col};
    const auto ci = idx(c);
    if (closed[ci]) continue;
    closed[ci] = 1;
    if (is_target.test(c)) {
      if (g[ci] < best_len) best_len = g[ci];
      if (!best_target || c < *best_target) best_target = c;
      continue;
    }
    for (Action a : kAllActions) {
      const Cell nb = offset(c, a);
      if (!is_target.in_bounds(nb) || obstacles.test(nb)) continue;
      const auto ni = idx(nb);
      if (closed[ni] || g[ci] + 1 >= g[ni]) continue;
      g[ni] = g[ci] + 1;
      parent[ni] = static_cast<int>(ci);
      open.emplace(g[ni] + heuristic(nb), nb.row, nb.col);
    }
  }
  if (!best_target) return std::nullopt;

  Path path;
  for (int i = static_cast<int>(idx(*best_target)); i != -1; i = parent[i])
    path.cells.push_back({i / width, i % width});
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

/// Action moving from `from` to the 4-adjacent cell `to`.
constexpr Action direction_to(Cell from, Cell to) noexcept {
  if (to.row < from.row) return Action::Up;
  if (to.row > from.row) return Action::Down;
  if (to.col < from.col) return Action::Left;
  return Action::Right;
}

}  // namespace colorgrid
