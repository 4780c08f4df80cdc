#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "colorgrid/astar.hpp"
#include "colorgrid/config.hpp"
#include "colorgrid/env.hpp"
#include "colorgrid/rng.hpp"
#include "colorgrid/state.hpp"

namespace colorgrid {

/// Scripted or learned controller for a single agent. One instance serves
/// one agent in one environment; per-episode memory is cleared by reset().
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual void reset(const GridState& initial, const EnvConfig& cfg, int agent, std::uint64_t seed) = 0;
  virtual Action act(const GridState& s) = 0;
  /// Called after every environment step with the resulting state.
  virtual void observe(const GridState& /*s*/, const StepOutcome& /*outcome*/) {}
};

// Fallback when no target is reachable: the first free neighbour in
// Up/Down/Left/Right order; failing that a move that is blocked (off-grid or
// into an agent) so the agent stays; failing that Up, which is only reached
// when every neighbour holds a non-target block.
inline Action wander_action(const GridState& s, Cell pos) noexcept {
  for (Action a : kAllActions) {
    const Cell c = offset(pos, a);
    if (s.in_bounds(c) && s.is_empty(c)) return a;
  }
  for (Action a : kAllActions) {
    const Cell c = offset(pos, a);
    if (!s.in_bounds(c) || s.agent_at(c) >= 0) return a;
  }
  return Action::Up;
}

/// Shortest-path route to the nearest block of `color`, treating every other
/// block and every other agent as impassable.
inline std::optional<Path> route_to_color(const GridState& s, int agent, BlockColor color) {
  GridMask obstacles(s.width, s.height);
  std::vector<Cell> targets;
  for (int i = 0; i < static_cast<int>(s.cells.size()); ++i) {
    if (s.cells[i] == kEmpty) continue;
    if (s.cells[i] == color.index)
      targets.push_back(s.cell_at(i));
    else
      obstacles.set(s.cell_at(i));
  }
  for (int j = 0; j < static_cast<int>(s.agents.size()); ++j)
    if (j != agent) obstacles.set(s.agents[j]);
  return astar_path(s.width, s.height, s.agents[agent], targets, obstacles);
}

struct LeaderPlan {
  Action action;
  std::optional<Cell> target;  // goal block being pursued, if any
};

inline LeaderPlan astar_leader_plan(const GridState& s, int agent) {
  const Cell pos = s.agents[agent];
  if (auto path = route_to_color(s, agent, s.goal); path && path->length() > 0)
    return {direction_to(pos, path->cells[1]), path->target()};
  return {wander_action(s, pos), std::nullopt};
}

inline Action astar_leader_act(const GridState& s, int agent) { return astar_leader_plan(s, agent).action; }

struct FollowerBelief {
  std::optional<BlockColor> believed_goal;
  std::optional<Cell> last_leader_position;

  friend bool operator==(const FollowerBelief&, const FollowerBelief&) = default;
};

/// Folds the leader collections of one step into the belief. Later entries
/// win when several leaders collect in the same step.
inline FollowerBelief update_belief(FollowerBelief belief, const GridState& s, const StepOutcome& outcome,
                                    int num_leaders) {
  for (const auto& c : outcome.collections)
    if (c.agent < num_leaders) belief.believed_goal = c.color;
  if (num_leaders > 0) belief.last_leader_position = s.agents[0];
  return belief;
}

inline Action astar_follower_act(const GridState& s, int agent, const FollowerBelief& belief) {
  const Cell pos = s.agents[agent];
  if (belief.believed_goal)
    if (auto path = route_to_color(s, agent, *belief.believed_goal); path && path->length() > 0)
      return direction_to(pos, path->cells[1]);
  return wander_action(s, pos);
}

class AStarLeader final : public Policy {
 public:
  std::string_view name() const noexcept override { return "astar_leader"; }
  void reset(const GridState&, const EnvConfig&, int agent, std::uint64_t) override { agent_ = agent; }
  Action act(const GridState& s) override {
    last_plan_ = astar_leader_plan(s, agent_);
    return last_plan_.action;
  }
  const LeaderPlan& last_plan() const noexcept { return last_plan_; }

 private:
  int agent_ = 0;
  LeaderPlan last_plan_{Action::Up, std::nullopt};
};

/// Copies the colour of the leader's latest collection.
class AStarCopier final : public Policy {
 public:
  std::string_view name() const noexcept override { return "astar_copier"; }
  void reset(const GridState& s, const EnvConfig& cfg, int agent, std::uint64_t) override {
    agent_ = agent;
    num_leaders_ = cfg.num_leaders;
    belief_ = {};
    belief_.last_leader_position = s.agents[0];
  }
  Action act(const GridState& s) override { return astar_follower_act(s, agent_, belief_); }
  void observe(const GridState& s, const StepOutcome& outcome) override {
    belief_ = update_belief(belief_, s, outcome, num_leaders_);
  }
  const FollowerBelief& belief() const noexcept { return belief_; }

 private:
  int agent_ = 0;
  int num_leaders_ = 1;
  FollowerBelief belief_;
};

class RandomPolicy final : public Policy {
 public:
  std::string_view name() const noexcept override { return "random"; }
  void reset(const GridState&, const EnvConfig&, int, std::uint64_t seed) override { rng_.seed(seed); }
  Action act(const GridState&) override { return random_act(rng_); }

  static Action random_act(Engine& rng) { return kAllActions[uniform_index(rng, kNumActions)]; }

 private:
  Engine rng_;
};

inline constexpr std::array<std::string_view, 3> kPolicyNames{"astar_leader", "astar_copier", "random"};

/// Returns nullptr for unknown names.
inline std::unique_ptr<Policy> make_policy(std::string_view name) {
  if (name == "astar_leader") return std::make_unique<AStarLeader>();
  if (name == "astar_copier") return std::make_unique<AStarCopier>();
  if (name == "random") return std::make_unique<RandomPolicy>();
  return nullptr;
}

}  // namespace colorgrid
