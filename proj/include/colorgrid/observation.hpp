#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "colorgrid/config.hpp"
#include "colorgrid/state.hpp"

namespace colorgrid {

inline constexpr int kNumChannels = 5;
inline constexpr int kLeaderPlane = 3;
inline constexpr int kFollowerPlane = 4;

/// Per-agent view of the world.
///
/// Tensor layout is (channel, row, col), row-major, one byte per entry:
/// planes 0..2 mark blocks of each color, plane 3 the leader(s) and plane 4
/// the follower(s). With role_relative_planes, plane 3 is the observing agent
/// and plane 4 everyone else. With view_radius r > 0 the planes are an
/// egocentric (2r+1)x(2r+1) crop; off-grid entries are zero.
struct Observation {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> channels;
  std::array<float, kNumColors> goal_vector{};
  int goal_label = 0;

  std::uint8_t at(int channel, int row, int col) const noexcept {
    return channels[(static_cast<std::size_t>(channel) * height + row) * width + col];
  }
  std::uint8_t& at(int channel, int row, int col) noexcept {
    return channels[(static_cast<std::size_t>(channel) * height + row) * width + col];
  }

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline void encode_into(const GridState& s, int agent, const EnvConfig& cfg, Observation& obs) {
  if (agent < 0 || agent >= static_cast<int>(s.agents.size()))
    throw std::out_of_range("encode: agent index out of range");
  const int r = cfg.view_radius;
  const bool crop = r > 0;
  obs.height = crop ? 2 * r + 1 : s.height;
  obs.width = crop ? 2 * r + 1 : s.width;
  obs.channels.assign(static_cast<std::size_t>(kNumChannels) * obs.height * obs.width, 0);
  const Cell self = s.agents[agent];
  const int row0 = crop ? self.row - r : 0;
  const int col0 = crop ? self.col - r : 0;

  auto mark = [&](int channel, Cell c) {
    const int rr = c.row - row0;
    const int cc = c.col - col0;
    if (rr >= 0 && rr < obs.height && cc >= 0 && cc < obs.width) obs.at(channel, rr, cc) = 1;
  };

  if (!crop) {
    for (int i = 0; i < static_cast<int>(s.cells.size()); ++i)
      if (s.cells[i] != kEmpty)
        obs.channels[static_cast<std::size_t>(s.cells[i]) * s.cells.size() + i] = 1;
  } else {
    for (int rr = 0; rr < obs.height; ++rr)
      for (int cc = 0; cc < obs.width; ++cc) {
        const Cell c{row0 + rr, col0 + cc};
        if (s.in_bounds(c) && s.has_block(c)) obs.at(s.block_at(c), rr, cc) = 1;
      }
  }
  for (int j = 0; j < static_cast<int>(s.agents.size()); ++j) {
    int plane = cfg.is_leader(j) ? kLeaderPlane : kFollowerPlane;
    if (cfg.role_relative_planes) plane = j == agent ? kLeaderPlane : kFollowerPlane;
    mark(plane, s.agents[j]);
  }

  obs.goal_vector.fill(0.0f);
  const bool hidden = cfg.asymmetric && !cfg.is_leader(agent);
  if (!hidden) obs.goal_vector[s.goal.index] = 1.0f;
  obs.goal_label = s.goal.index;
}

inline Observation encode(const GridState& s, int agent, const EnvConfig& cfg) {
  Observation obs;
  encode_into(s, agent, cfg, obs);
  return obs;
}

}  // namespace colorgrid
