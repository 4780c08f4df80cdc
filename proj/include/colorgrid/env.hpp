#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "colorgrid/config.hpp"
#include "colorgrid/reward_shaping.hpp"
#include "colorgrid/rng.hpp"
#include "colorgrid/state.hpp"
#include "colorgrid/types.hpp"

namespace colorgrid {

struct Collection {
  int agent = 0;
  Cell cell;
  BlockColor color;
  bool was_goal = false;
  Cell respawned_at;

  friend bool operator==(const Collection&, const Collection&) = default;
};

/// Everything that happened during one transition. Shaping terms are kept
/// apart from base rewards so metrics can always use unshaped reward.
struct StepOutcome {
  std::vector<double> base_rewards;
  std::vector<double> distance_terms;
  std::vector<double> potential_terms;
  std::vector<double> shaped_rewards;
  double shared_reward = 0.0;
  std::vector<Collection> collections;
  bool goal_switched = false;
  BlockColor new_goal;
  double anneal_coeff = 1.0;

  void clear(std::size_t n_agents) {
    base_rewards.assign(n_agents, 0.0);
    distance_terms.assign(n_agents, 0.0);
    potential_terms.assign(n_agents, 0.0);
    shaped_rewards.assign(n_agents, 0.0);
    shared_reward = 0.0;
    collections.clear();
    goal_switched = false;
  }

  double base_total() const noexcept {
    return std::accumulate(base_rewards.begin(), base_rewards.end(), 0.0);
  }
};

/// Builds the initial state. Blocks and agents occupy distinct uniformly
/// random cells (one partial Fisher-Yates shuffle of the placement stream);
/// the initial goal comes from the goal stream.
inline GridState reset(const EnvConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  GridState s;
  s.width = cfg.width;
  s.height = cfg.height;
  s.cells.assign(static_cast<std::size_t>(cfg.num_cells()), kEmpty);
  s.rng = RngStreams(seed);

  const int n_blocks = cfg.total_blocks();
  const int per_color = n_blocks / kNumColors;
  const int n_agents = cfg.num_agents();
  std::vector<int> order(static_cast<std::size_t>(cfg.num_cells()));
  std::iota(order.begin(), order.end(), 0);
  const int picks = n_blocks + n_agents;
  for (int i = 0; i < picks; ++i) {
    const auto j = i + static_cast<int>(uniform_index(s.rng.placement, order.size() - i));
    std::swap(order[i], order[j]);
  }
  for (int i = 0; i < n_blocks; ++i) s.cells[order[i]] = static_cast<std::int8_t>(i / per_color);
  s.agents.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i) s.agents.push_back(s.cell_at(order[n_blocks + i]));
  s.color_counts.fill(per_color);
  s.goal = BlockColor(static_cast<int>(uniform_index(s.rng.goal, kNumColors)));
  s.timestep = 0;
  return s;
}

inline constexpr int kRespawnRejectionTries = 64;

/// Places one block of `color` in a uniformly random empty cell.
///
/// Draw protocol (relied on by replay): up to kRespawnRejectionTries uniform
/// cell draws from the respawn stream, accepting the first empty one; if all
/// miss, one uniform draw among the empty cells in row-major order. Both
/// stages are uniform over the empty set, so the result is too.
inline Cell respawn_block(GridState& s, BlockColor color) {
  const auto n_cells = static_cast<std::uint64_t>(s.cells.size());
  for (int attempt = 0; attempt < kRespawnRejectionTries; ++attempt) {
    const Cell c = s.cell_at(static_cast<int>(uniform_index(s.rng.respawn, n_cells)));
    if (s.is_empty(c)) {
      s.cells[s.index(c)] = static_cast<std::int8_t>(color.index);
      return c;
    }
  }
  std::vector<int> empties;
  for (int i = 0; i < static_cast<int>(n_cells); ++i)
    if (s.is_empty(s.cell_at(i))) empties.push_back(i);
  if (empties.empty()) throw std::logic_error("respawn_block: no empty cell available");
  const int idx = empties[uniform_index(s.rng.respawn, empties.size())];
  s.cells[idx] = static_cast<std::int8_t>(color.index);
  return s.cell_at(idx);
}

/// With probability p the goal is redrawn uniformly from all three colors,
/// so it actually changes with probability 2p/3. One uniform draw is always
/// consumed, keeping the goal stream aligned whatever p is.
inline bool maybe_switch_goal(GridState& s, double resample_probability) {
  const double u = uniform01(s.rng.goal);
  if (u >= resample_probability) return false;
  const BlockColor next(static_cast<int>(uniform_index(s.rng.goal, kNumColors)));
  const bool changed = next != s.goal;
  s.goal = next;
  return changed;
}

/// Advances the state by one environment step.
///
/// Moves resolve simultaneously: off-grid moves stay put; a move into a cell
/// that held an agent at the start of the step is blocked (so swaps fail);
/// when several agents target the same cell the lowest index wins. Then
/// collection, respawn, shaping, goal switch and timestep++ in that order.
inline void step(GridState& s, const EnvConfig& cfg, std::span<const Action> actions,
                 std::uint64_t global_timestep, StepOutcome& out) {
  const auto n = s.agents.size();
  if (actions.size() != n)
    throw std::invalid_argument("step: expected " + std::to_string(n) + " actions, got " +
                                std::to_string(actions.size()));
  out.clear(n);
  out.anneal_coeff = anneal_coefficient(global_timestep, cfg.shaping);

  // Small fixed buffers: agent counts are tiny in practice.
  std::vector<Cell> target(n);
  std::vector<char> moved(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Cell t = offset(s.agents[i], actions[i]);
    target[i] = s.in_bounds(t) ? t : s.agents[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (target[i] == s.agents[i]) continue;
    bool blocked = false;
    for (std::size_t j = 0; j < n && !blocked; ++j)
      blocked = (j != i && s.agents[j] == target[i]) || (j < i && moved[j] && target[j] == target[i]);
    moved[i] = !blocked;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (moved[i]) s.agents[i] = target[i];

  for (std::size_t i = 0; i < n; ++i) {
    if (!moved[i]) continue;
    auto& cell = s.cells[s.index(s.agents[i])];
    if (cell == kEmpty) continue;
    const BlockColor color(cell);
    cell = kEmpty;
    const bool was_goal = color == s.goal;
    out.base_rewards[i] += base_reward(color, s.goal, cfg, out.anneal_coeff);
    out.collections.push_back({static_cast<int>(i), s.agents[i], color, was_goal, {}});
  }
  for (auto& c : out.collections) c.respawned_at = respawn_block(s, c.color);

  const bool potential = cfg.shaping.potential_field.has_value();
  const double k = potential ? potential_scale(cfg) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.distance_terms[i] = distance_term(s, cfg, static_cast<int>(i), global_timestep);
    if (potential)
      out.potential_terms[i] =
          potential_field_reward(s, s.agents[i], k, cfg.shaping.potential_field->radius);
    out.shaped_rewards[i] = out.base_rewards[i] + out.distance_terms[i] + out.potential_terms[i];
    out.shared_reward += out.shaped_rewards[i];
  }

  out.goal_switched = maybe_switch_goal(s, cfg.goal_resample_probability);
  out.new_goal = s.goal;
  ++s.timestep;
}

inline StepOutcome step(GridState& s, const EnvConfig& cfg, std::span<const Action> actions,
                        std::uint64_t global_timestep) {
  StepOutcome out;
  step(s, cfg, actions, global_timestep, out);
  return out;
}

/// Convenience owner of a config and its state.
class Environment {
 public:
  explicit Environment(EnvConfig cfg) : cfg_(std::move(cfg)) { reset(cfg_.seed); }

  const GridState& reset(std::uint64_t seed) {
    state_ = colorgrid::reset(cfg_, seed);
    return state_;
  }

  const StepOutcome& step(std::span<const Action> actions, std::uint64_t global_timestep) {
    colorgrid::step(state_, cfg_, actions, global_timestep, outcome_);
    return outcome_;
  }

  const EnvConfig& config() const noexcept { return cfg_; }
  const GridState& state() const noexcept { return state_; }
  const StepOutcome& last_outcome() const noexcept { return outcome_; }

 private:
  EnvConfig cfg_;
  GridState state_;
  StepOutcome outcome_;
};

}  // namespace colorgrid
