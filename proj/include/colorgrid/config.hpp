#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "colorgrid/types.hpp"

namespace colorgrid {

/// Linear ramp of the incorrect-block penalty over global training steps.
struct AnnealSchedule {
  std::uint64_t start = 4'000'000;
  std::uint64_t end = 10'000'000;

  friend bool operator==(const AnnealSchedule&, const AnnealSchedule&) = default;
};

enum class ShapingTarget : std::uint8_t { Leader, Follower, Both };

/// Constant penalty while an agent is within `threshold` (Manhattan) of the
/// nearest agent of the other role.
struct DistanceShaping {
  int threshold = 10;
  double penalty = 0.25;
  ShapingTarget applies_to = ShapingTarget::Follower;
  // Shaping is switched off once the global step counter reaches this value.
  std::optional<std::uint64_t> active_until;

  friend bool operator==(const DistanceShaping&, const DistanceShaping&) = default;
};

/// Inverse-distance field: goal blocks attract, incorrect blocks repel.
/// When `scale` is unset it is derived from the block counts so that the
/// field never exceeds a tenth of the goal reward.
struct PotentialField {
  std::optional<double> scale;
  int radius = 10;

  friend bool operator==(const PotentialField&, const PotentialField&) = default;
};

struct ShapingConfig {
  std::optional<AnnealSchedule> anneal;
  std::optional<DistanceShaping> distance;
  std::optional<PotentialField> potential_field;

  friend bool operator==(const ShapingConfig&, const ShapingConfig&) = default;
};

enum class RewardPresetName : std::uint8_t { Optimistic, Neutral, Pessimistic };

struct RewardPreset {
  RewardPresetName name;
  double reward_goal;
  double reward_incorrect;
};

inline constexpr RewardPreset kOptimistic{RewardPresetName::Optimistic, 4.0, -1.0};
inline constexpr RewardPreset kNeutral{RewardPresetName::Neutral, 2.0, -1.0};
inline constexpr RewardPreset kPessimistic{RewardPresetName::Pessimistic, 1.0, -1.0};

inline std::optional<RewardPreset> preset_from_name(std::string_view name) {
  if (name == "optimistic") return kOptimistic;
  if (name == "neutral") return kNeutral;
  if (name == "pessimistic") return kPessimistic;
  return std::nullopt;
}

inline std::string_view preset_name(RewardPresetName n) {
  switch (n) {
    case RewardPresetName::Optimistic: return "optimistic";
    case RewardPresetName::Neutral: return "neutral";
    case RewardPresetName::Pessimistic: return "pessimistic";
  }
  return "";
}

/// Shaping bundles used for the follower warmstart runs.
inline ShapingConfig warmstart_shaping(int variant) {
  ShapingConfig s;
  if (variant == 1) {
    s.distance = DistanceShaping{10, 0.25, ShapingTarget::Follower, 20'000'000};
    s.anneal = AnnealSchedule{10'000'000, 20'000'000};
  } else if (variant == 2) {
    s.distance = DistanceShaping{10, 0.5, ShapingTarget::Follower, 40'000'000};
    s.anneal = AnnealSchedule{4'000'000, 10'000'000};
  } else {
    throw ConfigError("unknown warmstart preset " + std::to_string(variant));
  }
  return s;
}

struct EnvConfig {
  int width = 32;
  int height = 32;
  double block_density = 0.10;
  double goal_resample_probability = 1.0 / 32.0;
  double reward_goal = 1.0;
  double reward_incorrect = -1.0;
  bool asymmetric = false;
  int num_leaders = 1;
  int num_followers = 1;
  ShapingConfig shaping;
  std::uint64_t seed = 0;

  // Observation options. view_radius > 0 selects an egocentric
  // (2r+1)x(2r+1) crop; role_relative_planes orders agent planes as
  // [self, others] instead of [leaders, followers].
  int view_radius = 0;
  bool role_relative_planes = false;

  int num_agents() const noexcept { return num_leaders + num_followers; }
  int num_cells() const noexcept { return width * height; }
  bool is_leader(int agent) const noexcept { return agent < num_leaders; }

  /// floor(density * cells) rounded down to a multiple of three.
  int total_blocks() const noexcept {
    const auto raw = static_cast<long long>(std::floor(block_density * num_cells() + 1e-9));
    return static_cast<int>(raw - raw % kNumColors);
  }
  int blocks_per_color() const noexcept { return total_blocks() / kNumColors; }

  void apply_preset(const RewardPreset& p) noexcept {
    reward_goal = p.reward_goal;
    reward_incorrect = p.reward_incorrect;
  }

  /// Throws ConfigError describing the first violated constraint.
  void validate() const {
    if (width <= 0 || height <= 0) throw ConfigError("width and height must be positive");
    if (!(block_density > 0.0 && block_density < 1.0))
      throw ConfigError("block_density must lie in (0, 1)");
    if (!(goal_resample_probability >= 0.0 && goal_resample_probability <= 1.0))
      throw ConfigError("goal_resample_probability must lie in [0, 1]");
    if (num_leaders < 1 || num_followers < 1)
      throw ConfigError("num_leaders and num_followers must be positive");
    if (total_blocks() < kNumColors)
      throw ConfigError("block_density too low: need at least one block per color, got " +
                        std::to_string(total_blocks()) + " blocks");
    if (total_blocks() + num_agents() > num_cells())
      throw ConfigError("grid too small: " + std::to_string(total_blocks()) + " blocks and " +
                        std::to_string(num_agents()) + " agents do not fit in " +
                        std::to_string(num_cells()) + " cells");
    if (!std::isfinite(reward_goal) || !std::isfinite(reward_incorrect))
      throw ConfigError("rewards must be finite");
    if (view_radius < 0) throw ConfigError("view_radius must be non-negative");
    if (shaping.anneal && shaping.anneal->start > shaping.anneal->end)
      throw ConfigError("anneal start must not exceed anneal end");
    if (shaping.distance) {
      if (shaping.distance->threshold < 0) throw ConfigError("distance threshold must be >= 0");
      if (!(shaping.distance->penalty >= 0.0)) throw ConfigError("distance penalty must be >= 0");
    }
    if (shaping.potential_field) {
      if (shaping.potential_field->radius < 0) throw ConfigError("potential radius must be >= 0");
      if (shaping.potential_field->scale && !(*shaping.potential_field->scale >= 0.0))
        throw ConfigError("potential scale must be >= 0");
    }
  }

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

// JSON form, used by trajectory headers and CLI output headers.

inline std::string_view target_name(ShapingTarget t) {
  switch (t) {
    case ShapingTarget::Leader: return "leader";
    case ShapingTarget::Follower: return "follower";
    case ShapingTarget::Both: return "both";
  }
  return "";
}

inline std::optional<ShapingTarget> target_from_name(std::string_view s) {
  if (s == "leader") return ShapingTarget::Leader;
  if (s == "follower") return ShapingTarget::Follower;
  if (s == "both") return ShapingTarget::Both;
  return std::nullopt;
}

inline nlohmann::json to_json(const EnvConfig& c) {
  nlohmann::json j{
      {"width", c.width},
      {"height", c.height},
      {"block_density", c.block_density},
      {"goal_resample_probability", c.goal_resample_probability},
      {"reward_goal", c.reward_goal},
      {"reward_incorrect", c.reward_incorrect},
      {"asymmetric", c.asymmetric},
      {"num_leaders", c.num_leaders},
      {"num_followers", c.num_followers},
      {"seed", c.seed},
      {"view_radius", c.view_radius},
      {"role_relative_planes", c.role_relative_planes},
  };
  nlohmann::json s = nlohmann::json::object();
  if (c.shaping.anneal) s["anneal"] = {{"start", c.shaping.anneal->start}, {"end", c.shaping.anneal->end}};
  if (const auto& d = c.shaping.distance) {
    s["distance"] = {{"threshold", d->threshold},
                     {"penalty", d->penalty},
                     {"applies_to", std::string(target_name(d->applies_to))}};
    if (d->active_until) s["distance"]["active_until"] = *d->active_until;
  }
  if (const auto& p = c.shaping.potential_field) {
    s["potential_field"] = {{"radius", p->radius}};
    if (p->scale) s["potential_field"]["scale"] = *p->scale;
  }
  j["shaping"] = std::move(s);
  return j;
}

inline EnvConfig config_from_json(const nlohmann::json& j) {
  EnvConfig c;
  c.width = j.at("width").get<int>();
  c.height = j.at("height").get<int>();
  c.block_density = j.at("block_density").get<double>();
  c.goal_resample_probability = j.at("goal_resample_probability").get<double>();
  c.reward_goal = j.at("reward_goal").get<double>();
  c.reward_incorrect = j.at("reward_incorrect").get<double>();
  c.asymmetric = j.at("asymmetric").get<bool>();
  c.num_leaders = j.at("num_leaders").get<int>();
  c.num_followers = j.at("num_followers").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.view_radius = j.value("view_radius", 0);
  c.role_relative_planes = j.value("role_relative_planes", false);
  if (j.contains("shaping")) {
    const auto& s = j.at("shaping");
    if (s.contains("anneal"))
      c.shaping.anneal = AnnealSchedule{s["anneal"].at("start").get<std::uint64_t>(),
                                        s["anneal"].at("end").get<std::uint64_t>()};
    if (s.contains("distance")) {
      const auto& d = s["distance"];
      DistanceShaping ds;
      ds.threshold = d.at("threshold").get<int>();
      ds.penalty = d.at("penalty").get<double>();
      auto target = target_from_name(d.at("applies_to").get<std::string>());
      if (!target) throw ConfigError("unknown shaping target");
      ds.applies_to = *target;
      if (d.contains("active_until")) ds.active_until = d["active_until"].get<std::uint64_t>();
      c.shaping.distance = ds;
    }
    if (s.contains("potential_field")) {
      const auto& p = s["potential_field"];
      PotentialField pf;
      pf.radius = p.at("radius").get<int>();
      if (p.contains("scale")) pf.scale = p["scale"].get<double>();
      c.shaping.potential_field = pf;
    }
  }
  return c;
}

}  // namespace colorgrid
