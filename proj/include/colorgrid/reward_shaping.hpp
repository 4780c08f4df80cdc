#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>

#include "colorgrid/config.hpp"
#include "colorgrid/state.hpp"

namespace colorgrid {

/// Penalty coefficient in [0, 1]: 0 before the schedule starts, 1 from its
/// end onward, linear in between. Without a schedule the penalty is always on.
inline double anneal_coefficient(std::uint64_t global_timestep, const ShapingConfig& cfg) noexcept {
  if (!cfg.anneal) return 1.0;
  const auto [start, end] = *cfg.anneal;
  if (global_timestep >= end) return 1.0;
  if (global_timestep <= start) return 0.0;
  return static_cast<double>(global_timestep - start) / static_cast<double>(end - start);
}

/// Reward for collecting a block. Annealing scales only the penalty.
inline double base_reward(BlockColor collected, BlockColor goal, const EnvConfig& cfg,
                          double anneal_coeff) noexcept {
  return collected == goal ? cfg.reward_goal : anneal_coeff * cfg.reward_incorrect;
}

inline double expected_random_pickup_value(const RewardPreset& p) noexcept {
  return p.reward_goal / 3.0 + 2.0 * p.reward_incorrect / 3.0;
}

inline bool distance_shaping_active(const DistanceShaping& d, std::uint64_t global_timestep) noexcept {
  return !d.active_until || global_timestep < *d.active_until;
}

/// -penalty when the two agents are strictly closer than the threshold.
inline double distance_penalty(Cell leader, Cell follower, const ShapingConfig& cfg) noexcept {
  if (!cfg.distance) return 0.0;
  return manhattan(leader, follower) < cfg.distance->threshold ? -cfg.distance->penalty : 0.0;
}

/// Upper bound on sum_{blocks} 1/max(1, d) for `n_blocks` blocks within
/// `radius` of an agent. The n nearest non-agent cells of an unbounded grid
/// (4d cells at distance d) dominate any placement on a finite one.
inline double potential_sum_bound(int n_blocks, int radius) noexcept {
  double total = 0.0;
  int remaining = n_blocks;
  for (int d = 1; d <= radius && remaining > 0; ++d) {
    const int ring = std::min(remaining, 4 * d);
    total += static_cast<double>(ring) / d;
    remaining -= ring;
  }
  return total;
}

/// Scale k for the potential field. An explicit scale wins; otherwise k is
/// chosen so |field| <= reward_goal / 10 for any placement of the blocks.
inline double potential_scale(const EnvConfig& cfg) noexcept {
  if (!cfg.shaping.potential_field) return 0.0;
  const auto& pf = *cfg.shaping.potential_field;
  if (pf.scale) return *pf.scale;
  // Incorrect blocks outnumber goal blocks two to one.
  const double bound = potential_sum_bound(2 * cfg.blocks_per_color(), pf.radius);
  return bound > 0.0 ? 0.1 * cfg.reward_goal / bound : 0.0;
}

/// Sum over blocks within the radius of +/- k / max(1, d).
inline double potential_field_reward(const GridState& s, Cell agent, double scale, int radius) noexcept {
  if (scale == 0.0) return 0.0;
  double total = 0.0;
  const int r0 = std::max(0, agent.row - radius);
  const int r1 = std::min(s.height - 1, agent.row + radius);
  for (int r = r0; r <= r1; ++r) {
    const int dr = r > agent.row ? r - agent.row : agent.row - r;
    const int span = radius - dr;
    const int c0 = std::max(0, agent.col - span);
    const int c1 = std::min(s.width - 1, agent.col + span);
    const std::int8_t* row = s.cells.data() + static_cast<std::ptrdiff_t>(r) * s.width;
    for (int c = c0; c <= c1; ++c) {
      const std::int8_t b = row[c];
      if (b == kEmpty) continue;
      const int d = std::max(1, dr + (c > agent.col ? c - agent.col : agent.col - c));
      const double v = scale / d;
      total += b == s.goal.index ? v : -v;
    }
  }
  return total;
}

inline double potential_field_reward(const GridState& s, Cell agent, const EnvConfig& cfg) noexcept {
  if (!cfg.shaping.potential_field) return 0.0;
  return potential_field_reward(s, agent, potential_scale(cfg), cfg.shaping.potential_field->radius);
}

/// Distance shaping for one agent: compares against the nearest agent of the
/// other role. Returns 0 when the agent's role is not targeted.
inline double distance_term(const GridState& s, const EnvConfig& cfg, int agent,
                            std::uint64_t global_timestep) noexcept {
  const auto& d = cfg.shaping.distance;
  if (!d || !distance_shaping_active(*d, global_timestep)) return 0.0;
  const bool leader = cfg.is_leader(agent);
  if ((d->applies_to == ShapingTarget::Leader && !leader) ||
      (d->applies_to == ShapingTarget::Follower && leader))
    return 0.0;
  int nearest = std::numeric_limits<int>::max();
  Cell partner = s.agents[agent];
  for (int j = 0; j < cfg.num_agents(); ++j) {
    if (cfg.is_leader(j) == leader) continue;
    const int dist = manhattan(s.agents[agent], s.agents[j]);
    if (dist < nearest) {
      nearest = dist;
      partner = s.agents[j];
    }
  }
  return leader ? distance_penalty(s.agents[agent], partner, cfg.shaping)
                : distance_penalty(partner, s.agents[agent], cfg.shaping);
}

}  // namespace colorgrid
