#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colorgrid/config.hpp"
#include "colorgrid/env.hpp"
#include "colorgrid/harness.hpp"

namespace colorgrid {

// Trajectory file, format version 1. UTF-8 text, one JSON object per line.
//
// Line 1, header:
//   format           "colorgrid-trajectory"
//   version          1
//   config           resolved EnvConfig (see to_json(EnvConfig))
//   seed             episode seed passed to reset()
//   policies         {"leader": name, "follower": name}
//   horizon          number of step lines that follow
//   global_timestep  value fed to the annealing schedule on every step
// Lines 2..horizon+1, one per step t = 0..horizon-1:
//   t                step index
//   actions          one of U/D/L/R per agent, leaders first
//   agents           [[row, col], ...] after the step
//   goal             goal color index after the step
//   goal_switched    whether the goal changed during the step
//   collections      [[agent, row, col, color, was_goal, respawn_row, respawn_col], ...]
//   base_rewards     per-agent unshaped reward
//   shaped_rewards   per-agent reward including shaping
//   hash             state_hash after the step, 16 lowercase hex digits
//
// Replay needs only the header and the actions; every other field is
// checked against the re-simulated episode.

inline constexpr int kTrajectoryVersion = 1;
inline constexpr const char* kTrajectoryFormat = "colorgrid-trajectory";

struct TrajectoryHeader {
  EnvConfig config;
  std::uint64_t seed = 0;
  std::string leader_policy;
  std::string follower_policy;
  int horizon = 0;
  std::uint64_t global_timestep = 0;
  int version = kTrajectoryVersion;
};

struct StepRecord {
  std::vector<Action> actions;
  std::vector<Cell> agents;
  BlockColor goal;
  bool goal_switched = false;
  std::vector<Collection> collections;
  std::vector<double> base_rewards;
  std::vector<double> shaped_rewards;
  std::uint64_t hash = 0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct TrajectoryRecord {
  TrajectoryHeader header;
  std::vector<StepRecord> steps;
};

/// Malformed or unsupported trajectory file. step_index is -1 for the header.
class TrajectoryParseError : public std::runtime_error {
 public:
  TrajectoryParseError(const std::string& what, std::size_t byte_offset, long step_index)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) +
                           (step_index >= 0 ? ", step " + std::to_string(step_index) : std::string(", header")) + ")"),
        byte_offset_(byte_offset), step_index_(step_index) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }
  long step_index() const noexcept { return step_index_; }

 private:
  std::size_t byte_offset_;
  long step_index_;
};

/// Re-simulation disagreed with the record.
class ReplayMismatch : public std::runtime_error {
 public:
  ReplayMismatch(const std::string& field, long step_index)
      : std::runtime_error("replay mismatch in '" + field + "' at step " + std::to_string(step_index)),
        step_index_(step_index) {}
  long step_index() const noexcept { return step_index_; }

 private:
  long step_index_;
};

inline StepRecord make_step_record(std::span<const Action> actions, const GridState& s, const StepOutcome& out) {
  return {std::vector<Action>(actions.begin(), actions.end()),
          s.agents,
          s.goal,
          out.goal_switched,
          out.collections,
          out.base_rewards,
          out.shaped_rewards,
          state_hash(s)};
}

/// Runs one episode with the named role policies and records it.
inline TrajectoryRecord record_episode(const EnvConfig& cfg, std::uint64_t seed, const std::string& leader,
                                       const std::string& follower, int horizon,
                                       std::uint64_t global_timestep = 0) {
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  TrajectoryRecord rec{{cfg, seed, leader, follower, horizon, global_timestep, kTrajectoryVersion}, {}};
  rec.steps.reserve(static_cast<std::size_t>(horizon));
  run_episode(cfg, seed, role_factory(cfg, leader, follower), horizon, global_timestep,
              [&rec](std::span<const Action> a, const GridState& s, const StepOutcome& out) {
                rec.steps.push_back(make_step_record(a, s, out));
              });
  return rec;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline nlohmann::json step_to_json(const StepRecord& r, std::size_t t) {
  std::string actions;
  for (Action a : r.actions) actions.push_back(action_char(a));
  nlohmann::json agents = nlohmann::json::array();
  for (Cell c : r.agents) agents.push_back({c.row, c.col});
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : r.collections)
    cols.push_back({c.agent, c.cell.row, c.cell.col, c.color.index, c.was_goal, c.respawned_at.row,
                    c.respawned_at.col});
  return {{"t", t},
          {"actions", actions},
          {"agents", agents},
          {"goal", r.goal.index},
          {"goal_switched", r.goal_switched},
          {"collections", cols},
          {"base_rewards", r.base_rewards},
          {"shaped_rewards", r.shaped_rewards},
          {"hash", hex64(r.hash)}};
}

inline void write_trajectory(const TrajectoryRecord& rec, std::ostream& os) {
  const auto& h = rec.header;
  nlohmann::json header{{"format", kTrajectoryFormat},
                        {"version", h.version},
                        {"config", to_json(h.config)},
                        {"seed", h.seed},
                        {"policies", {{"leader", h.leader_policy}, {"follower", h.follower_policy}}},
                        {"horizon", h.horizon},
                        {"global_timestep", h.global_timestep}};
  os << header.dump() << '\n';
  for (std::size_t t = 0; t < rec.steps.size(); ++t) os << step_to_json(rec.steps[t], t).dump() << '\n';
}

namespace detail {

inline StepRecord step_from_json(const nlohmann::json& j, int n_agents) {
  StepRecord r;
  for (char ch : j.at("actions").get<std::string>()) {
    auto a = action_from_char(ch);
    if (!a) throw std::invalid_argument(std::string("bad action character '") + ch + "'");
    r.actions.push_back(*a);
  }
  if (static_cast<int>(r.actions.size()) != n_agents) throw std::invalid_argument("wrong number of actions");
  for (const auto& c : j.at("agents")) r.agents.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  r.goal = BlockColor(j.at("goal").get<int>());
  r.goal_switched = j.at("goal_switched").get<bool>();
  for (const auto& c : j.at("collections"))
    r.collections.push_back({c.at(0).get<int>(),
                             {c.at(1).get<int>(), c.at(2).get<int>()},
                             BlockColor(c.at(3).get<int>()),
                             c.at(4).get<bool>(),
                             {c.at(5).get<int>(), c.at(6).get<int>()}});
  r.base_rewards = j.at("base_rewards").get<std::vector<double>>();
  r.shaped_rewards = j.at("shaped_rewards").get<std::vector<double>>();
  r.hash = std::stoull(j.at("hash").get<std::string>(), nullptr, 16);
  return r;
}

}  // namespace detail

/// Parses a trajectory stream. Errors name the byte offset of the offending
/// line and its step index.
inline TrajectoryRecord read_trajectory(std::istream& is) {
  TrajectoryRecord rec;
  std::string line;
  std::size_t offset = 0;

  if (!std::getline(is, line)) throw TrajectoryParseError("empty trajectory file", 0, -1);
  try {
    const auto h = nlohmann::json::parse(line);
    if (h.at("format").get<std::string>() != kTrajectoryFormat)
      throw TrajectoryParseError("not a colorgrid trajectory", 0, -1);
    rec.header.version = h.at("version").get<int>();
    if (rec.header.version != kTrajectoryVersion)
      throw TrajectoryParseError("unsupported trajectory version " + std::to_string(rec.header.version) +
                                     " (expected " + std::to_string(kTrajectoryVersion) + ")",
                                 0, -1);
    rec.header.config = config_from_json(h.at("config"));
    rec.header.seed = h.at("seed").get<std::uint64_t>();
    rec.header.leader_policy = h.at("policies").at("leader").get<std::string>();
    rec.header.follower_policy = h.at("policies").at("follower").get<std::string>();
    rec.header.horizon = h.at("horizon").get<int>();
    rec.header.global_timestep = h.at("global_timestep").get<std::uint64_t>();
  } catch (const TrajectoryParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw TrajectoryParseError(std::string("bad header: ") + e.what(), 0, -1);
  }
  offset += line.size() + 1;

  const int n_agents = rec.header.config.num_agents();
  for (long t = 0; t < rec.header.horizon; ++t) {
    if (!std::getline(is, line))
      throw TrajectoryParseError("truncated trajectory: expected " + std::to_string(rec.header.horizon) +
                                     " steps, found " + std::to_string(t),
                                 offset, t);
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("t").get<long>() != t) throw std::invalid_argument("step index out of sequence");
      rec.steps.push_back(detail::step_from_json(j, n_agents));
    } catch (const std::exception& e) {
      throw TrajectoryParseError(std::string("bad step entry: ") + e.what(), offset, t);
    }
    offset += line.size() + 1;
  }
  return rec;
}

inline std::string to_string(const TrajectoryRecord& rec) {
  std::ostringstream os;
  write_trajectory(rec, os);
  return os.str();
}

inline TrajectoryRecord parse_trajectory(const std::string& text) {
  std::istringstream is(text);
  return read_trajectory(is);
}

/// Re-simulates the recorded actions from reset(config, seed) and checks
/// every recorded field. Returns the initial state followed by the state
/// after each step.
inline std::vector<GridState> replay(const TrajectoryRecord& rec) {
  const auto& h = rec.header;
  std::vector<GridState> states;
  states.reserve(rec.steps.size() + 1);
  states.push_back(reset(h.config, h.seed));
  GridState s = states.back();
  StepOutcome out;
  for (std::size_t t = 0; t < rec.steps.size(); ++t) {
    const auto& r = rec.steps[t];
    step(s, h.config, r.actions, h.global_timestep, out);
    const StepRecord got = make_step_record(r.actions, s, out);
    const auto ti = static_cast<long>(t);
    if (got.agents != r.agents) throw ReplayMismatch("agents", ti);
    if (got.goal != r.goal) throw ReplayMismatch("goal", ti);
    if (got.goal_switched != r.goal_switched) throw ReplayMismatch("goal_switched", ti);
    if (got.collections != r.collections) throw ReplayMismatch("collections", ti);
    if (got.base_rewards != r.base_rewards) throw ReplayMismatch("base_rewards", ti);
    if (got.shaped_rewards != r.shaped_rewards) throw ReplayMismatch("shaped_rewards", ti);
    if (got.hash != r.hash) throw ReplayMismatch("hash", ti);
    states.push_back(s);
  }
  return states;
}

}  // namespace colorgrid
