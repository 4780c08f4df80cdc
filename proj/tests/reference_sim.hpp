#pragma once

// Straightforward second implementation of the transition rules, used as an
// oracle. It shares only the random primitives (engine + bounded draws) with
// the library so that both consume identical random numbers; the movement,
// blocking, collection, respawn and goal logic is written independently.

#include <cstdint>
#include <utility>
#include <vector>

#include "colorgrid/config.hpp"
#include "colorgrid/env.hpp"
#include "colorgrid/rng.hpp"
#include "colorgrid/state.hpp"

namespace refsim {

struct Pickup {
  int agent;
  int row;
  int col;
  int color;
  bool matched;
  int spawn_row;
  int spawn_col;
};

struct World {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<int>> grid;  // -1 empty, else color
  std::vector<std::pair<int, int>> pos;
  int goal = 0;
  std::uint64_t t = 0;
  colorgrid::RngStreams rng;
};

struct Result {
  std::vector<double> rewards;
  std::vector<Pickup> pickups;
  bool switched = false;
};

inline World from_state(const colorgrid::GridState& s) {
  World w;
  w.rows = s.height;
  w.cols = s.width;
  w.grid.assign(w.rows, std::vector<int>(w.cols, -1));
  for (int r = 0; r < w.rows; ++r)
    for (int c = 0; c < w.cols; ++c) w.grid[r][c] = s.cells[r * s.width + c];
  for (auto a : s.agents) w.pos.emplace_back(a.row, a.col);
  w.goal = s.goal.index;
  w.t = s.timestep;
  w.rng = s.rng;
  return w;
}

inline bool agent_on(const World& w, int r, int c) {
  for (auto& p : w.pos)
    if (p.first == r && p.second == c) return true;
  return false;
}

inline std::pair<int, int> spawn(World& w, int color) {
  const int n = w.rows * w.cols;
  for (int k = 0; k < 64; ++k) {
    int idx = static_cast<int>(colorgrid::uniform_index(w.rng.respawn, n));
    int r = idx / w.cols, c = idx % w.cols;
    if (w.grid[r][c] == -1 && !agent_on(w, r, c)) {
      w.grid[r][c] = color;
      return {r, c};
    }
  }
  std::vector<std::pair<int, int>> free;
  for (int r = 0; r < w.rows; ++r)
    for (int c = 0; c < w.cols; ++c)
      if (w.grid[r][c] == -1 && !agent_on(w, r, c)) free.emplace_back(r, c);
  auto pick = free[colorgrid::uniform_index(w.rng.respawn, free.size())];
  w.grid[pick.first][pick.second] = color;
  return pick;
}

inline double coefficient(const colorgrid::EnvConfig& cfg, std::uint64_t gt) {
  if (!cfg.shaping.anneal) return 1.0;
  double a = static_cast<double>(cfg.shaping.anneal->start);
  double b = static_cast<double>(cfg.shaping.anneal->end);
  double x = static_cast<double>(gt);
  if (x >= b) return 1.0;
  if (x <= a) return 0.0;
  return (x - a) / (b - a);
}

// actions: 0 up, 1 down, 2 left, 3 right
inline Result step(World& w, const colorgrid::EnvConfig& cfg, const std::vector<int>& actions,
                   std::uint64_t global_t) {
  const int n = static_cast<int>(w.pos.size());
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  Result res;
  res.rewards.assign(n, 0.0);

  std::vector<std::pair<int, int>> want(n);
  for (int i = 0; i < n; ++i) {
    int r = w.pos[i].first + dr[actions[i]];
    int c = w.pos[i].second + dc[actions[i]];
    if (r < 0 || r >= w.rows || c < 0 || c >= w.cols) {
      r = w.pos[i].first;
      c = w.pos[i].second;
    }
    want[i] = {r, c};
  }
  std::vector<bool> ok(n, false);
  for (int i = 0; i < n; ++i) {
    if (want[i] == w.pos[i]) continue;
    bool good = true;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (w.pos[j] == want[i]) good = false;           // occupied at start of step
      if (j < i && ok[j] && want[j] == want[i]) good = false;  // taken by higher priority
    }
    ok[i] = good;
  }
  for (int i = 0; i < n; ++i)
    if (ok[i]) w.pos[i] = want[i];

  double coeff = coefficient(cfg, global_t);
  for (int i = 0; i < n; ++i) {
    if (!ok[i]) continue;
    auto [r, c] = w.pos[i];
    int color = w.grid[r][c];
    if (color < 0) continue;
    w.grid[r][c] = -1;
    bool matched = color == w.goal;
    res.rewards[i] = matched ? cfg.reward_goal : coeff * cfg.reward_incorrect;
    res.pickups.push_back({i, r, c, color, matched, -1, -1});
  }
  for (auto& p : res.pickups) {
    auto where = spawn(w, p.color);
    p.spawn_row = where.first;
    p.spawn_col = where.second;
  }

  double u = colorgrid::uniform01(w.rng.goal);
  if (u < cfg.goal_resample_probability) {
    int g = static_cast<int>(colorgrid::uniform_index(w.rng.goal, 3));
    res.switched = g != w.goal;
    w.goal = g;
  }
  w.t += 1;
  return res;
}

// Compares an engine state and outcome against the reference after the same step.
inline bool matches(const colorgrid::GridState& s, const colorgrid::StepOutcome& out, const World& w, const Result& r) {
  if (w.t != s.timestep || w.goal != s.goal.index) return false;
  if (!(w.rng == s.rng)) return false;
  for (int row = 0; row < w.rows; ++row)
    for (int col = 0; col < w.cols; ++col)
      if (w.grid[row][col] != s.block_at({row, col})) return false;
  for (std::size_t i = 0; i < w.pos.size(); ++i)
    if (w.pos[i].first != s.agents[i].row || w.pos[i].second != s.agents[i].col) return false;
  if (r.rewards != out.base_rewards || r.switched != out.goal_switched) return false;
  if (r.pickups.size() != out.collections.size()) return false;
  for (std::size_t i = 0; i < r.pickups.size(); ++i) {
    const auto& p = r.pickups[i];
    const auto& c = out.collections[i];
    if (p.agent != c.agent || p.row != c.cell.row || p.col != c.cell.col || p.color != c.color.index ||
        p.matched != c.was_goal || p.spawn_row != c.respawned_at.row || p.spawn_col != c.respawned_at.col)
      return false;
  }
  return true;
}

}  // namespace refsim
