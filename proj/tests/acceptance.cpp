// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bfs_oracle.hpp"
#include "colorgrid/colorgrid.hpp"
#include "reference_sim.hpp"
#include "test_util.hpp"

using namespace colorgrid;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict conservation() {
  const auto t0 = Clock::now();
  EnvConfig cfg;
  GridState s = reset(cfg, 2024);
  const int per_color = cfg.blocks_per_color();
  Engine rng(1);
  StepOutcome out;
  constexpr long kSteps = 100'000;
  long violations = 0;
  for (long t = 0; t < kSteps; ++t) {
    step(s, cfg, testutil::random_actions(rng, 2), 0, out);
    for (int c = 0; c < kNumColors; ++c)
      if (s.count_color(BlockColor(c)) != per_color) ++violations;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 10.0, fmt("%ld steps, %ld violations, %.2f s (limit 10 s)", kSteps, violations, secs)};
}

Verdict goal_switching() {
  const auto t0 = Clock::now();
  EnvConfig cfg;
  GridState s = reset(cfg, 99);
  Engine rng(2);
  StepOutcome out;
  constexpr long kSteps = 1'000'000;
  long changes = 0;
  for (long t = 0; t < kSteps; ++t) {
    const BlockColor before = s.goal;
    step(s, cfg, testutil::random_actions(rng, 2), 0, out);
    if (s.goal != before) ++changes;
  }
  const double secs = seconds_since(t0);
  const double freq = static_cast<double>(changes) / kSteps;
  return {freq >= 0.0188 && freq <= 0.0228 && secs < 60.0,
          fmt("frequency %.5f (band [0.0188, 0.0228]), %.2f s (limit 60 s)", freq, secs)};
}

Verdict preset_values() {
  struct Case {
    const char* name;
    RewardPreset preset;
    double target;
  };
  const Case cases[] = {{"optimistic", kOptimistic, 2.0 / 3.0},
                        {"neutral", kNeutral, 0.0},
                        {"pessimistic", kPessimistic, -1.0 / 3.0}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, preset, target] : cases) {
    EnvConfig cfg;
    cfg.apply_preset(preset);
    GridState s = reset(cfg, 7);
    Engine rng(3);
    StepOutcome out;
    double total = 0.0;
    long collections = 0;
    while (collections < 100'000) {
      step(s, cfg, testutil::random_actions(rng, 2), 0, out);
      if (out.anneal_coeff != 1.0) return {false, "anneal coefficient is not 1"};
      total += out.base_total();
      collections += static_cast<long>(out.collections.size());
    }
    const double mean = total / static_cast<double>(collections);
    ok = ok && std::abs(mean - target) <= 0.05;
    detail += fmt("%s %.4f (target %+.4f) ", name, mean, target);
  }
  return {ok, detail + "over 1e5 collections each, tolerance 0.05"};
}

Verdict annealing() {
  ShapingConfig cfg;
  cfg.anneal = AnnealSchedule{4'000'000, 10'000'000};
  const double a = anneal_coefficient(4'000'000, cfg);
  const double b = anneal_coefficient(7'000'000, cfg);
  const double c = anneal_coefficient(10'000'000, cfg);
  return {a == 0.0 && b == 0.5 && c == 1.0, fmt("c(4M)=%g c(7M)=%g c(10M)=%g", a, b, c)};
}

Verdict astar_oracle() {
  long checked = 0;
  long mismatches = 0;
  auto check = [&](int w, int h, Cell start, const std::vector<Cell>& targets, const GridMask& m) {
    const auto path = astar_path(w, h, start, targets, m);
    const auto ref = bfsref::bfs(w, h, start, targets, m);
    ++checked;
    if ((path ? path->length() : -1) != ref.distance) ++mismatches;
  };
  // Every obstacle layout of the 5x5 grid, corner to corner.
  const std::vector<Cell> corner{{4, 4}};
  for (std::uint32_t bits = 0; bits < (1u << 25); ++bits) {
    if ((bits & 1u) || (bits >> 24 & 1u)) continue;
    GridMask m(5, 5);
    for (int i = 0; i < 25; ++i) m.bits[i] = (bits >> i) & 1u;
    check(5, 5, {0, 0}, corner, m);
  }
  // Every start and target on sampled 5x5 layouts.
  Engine rng(55);
  for (int layout = 0; layout < 200; ++layout) {
    const GridMask m = bfsref::random_mask(rng, 5, 5, 0.05 + 0.45 * uniform01(rng));
    for (int s = 0; s < 25; ++s) {
      if (m.bits[s]) continue;
      for (int t = 0; t < 25; ++t) check(5, 5, {s / 5, s % 5}, {Cell{t / 5, t % 5}}, m);
    }
  }
  int random8 = 0;
  while (random8 < 500) {
    const GridMask m = bfsref::random_mask(rng, 8, 8, 0.4 * uniform01(rng));
    const Cell start{static_cast<int>(uniform_index(rng, 8)), static_cast<int>(uniform_index(rng, 8))};
    if (m.test(start)) continue;
    std::vector<Cell> targets;
    const int n = 1 + static_cast<int>(uniform_index(rng, 6));
    for (int i = 0; i < n; ++i)
      targets.push_back({static_cast<int>(uniform_index(rng, 8)), static_cast<int>(uniform_index(rng, 8))});
    check(8, 8, start, targets, m);
    ++random8;
  }
  return {mismatches == 0, fmt("%ld instances (all 2^23 5x5 layouts, sampled all-pairs, 500 random 8x8), %ld mismatches",
                               checked, mismatches)};
}

Verdict step_oracle() {
  Engine rng(77);
  int episodes = 0;
  long steps = 0;
  while (episodes < 200) {
    EnvConfig cfg = testutil::small_config(5, 5, 0.12 + 0.4 * uniform01(rng));
    cfg.goal_resample_probability = uniform01(rng);
    cfg.apply_preset(kOptimistic);
    if (episodes % 2 == 0) cfg.shaping.anneal = AnnealSchedule{0, 50};
    GridState s = reset(cfg, rng());
    refsim::World world = refsim::from_state(s);
    for (int t = 0; t < 100; ++t) {
      const auto acts = testutil::random_actions(rng, 2);
      const std::vector<int> ia{static_cast<int>(acts[0]), static_cast<int>(acts[1])};
      const auto out = step(s, cfg, acts, static_cast<std::uint64_t>(t));
      const auto res = refsim::step(world, cfg, ia, static_cast<std::uint64_t>(t));
      ++steps;
      if (!refsim::matches(s, out, world, res))
        return {false, fmt("divergence in episode %d at step %d", episodes, t)};
    }
    ++episodes;
  }
  return {true, fmt("%d episodes, %ld transitions identical", episodes, steps)};
}

// Values frozen from the first verified run: neutral preset, base seed 0,
// 100 seeds of 16 environments x 128 steps.
Verdict baselines() {
  EnvConfig cfg;
  cfg.apply_preset(kNeutral);
  EvalSpec spec;
  spec.n_seeds = 100;
  const auto copier = evaluate(cfg, spec);
  spec.follower_policy = "random";
  spec.leader_policy = "random";
  const auto random = evaluate(cfg, spec);
  const bool order = copier.mean > random.mean && copier.per_agent_mean[0] > 0.0;
  const bool frozen = std::abs(copier.mean - 100.846875) < 1e-9 && std::abs(random.mean - -0.031875) < 1e-9 &&
                      std::abs(copier.per_agent_mean[0] - 54.7025) < 1e-9;
  return {order && frozen, fmt("copier run %.6f > random run %.6f, leader mean %.6f > 0, frozen values %s",
                               copier.mean, random.mean, copier.per_agent_mean[0], frozen ? "match" : "differ")};
}

Verdict determinism() {
  EnvConfig cfg;
  cfg.seed = 31337;
  EvalSpec wide;
  wide.n_envs = 16;
  wide.n_seeds = 2;
  EvalSpec narrow = wide;
  narrow.n_envs = 1;
  narrow.n_seeds = 32;
  const auto a = evaluate(cfg, wide);
  const auto b = evaluate(cfg, wide);
  const auto c = evaluate(cfg, narrow);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.episodes.size(); ++i)
    if (a.episodes[i].trajectory_hash != b.episodes[i].trajectory_hash ||
        a.episodes[i].trajectory_hash != c.episodes[i].trajectory_hash)
      ++differ;
  const bool ok = differ == 0 && a.episodes.size() == 32 && c.episodes.size() == 32;
  return {ok, fmt("%zu episodes, %zu hash differences across reruns and 16-env vs 1-env", a.episodes.size(), differ)};
}

Verdict replay_fidelity() {
  Engine rng(50);
  const std::vector<std::string> policies{"astar_leader", "astar_copier", "random"};
  int mismatched = 0;
  for (int ep = 0; ep < 50; ++ep) {
    EnvConfig cfg;
    cfg.apply_preset(kPessimistic);
    cfg.goal_resample_probability = 0.1 * uniform01(rng);
    cfg.shaping.distance = DistanceShaping{};
    const auto& leader = policies[uniform_index(rng, 3)];
    const auto& follower = policies[uniform_index(rng, 3)];
    const auto rec = record_episode(cfg, rng(), leader, follower, 128);
    try {
      const auto states = replay(parse_trajectory(to_string(rec)));
      for (std::size_t t = 0; t < rec.steps.size(); ++t)
        if (state_hash(states[t + 1]) != rec.steps[t].hash) throw ReplayMismatch("hash", static_cast<long>(t));
    } catch (const std::exception&) {
      ++mismatched;
    }
  }
  return {mismatched == 0, fmt("50 episodes x 128 steps, %d mismatched", mismatched)};
}

Verdict throughput() {
  Environment env{EnvConfig{}};
  RandomPolicy leader, follower;
  leader.reset(env.state(), env.config(), 0, 1);
  follower.reset(env.state(), env.config(), 1, 2);
  std::vector<Action> actions(2);
  constexpr long kSteps = 2'000'000;
  const auto t0 = Clock::now();
  for (long t = 0; t < kSteps; ++t) {
    actions[0] = leader.act(env.state());
    actions[1] = follower.act(env.state());
    env.step(actions, static_cast<std::uint64_t>(t));
  }
  const double rate = kSteps / seconds_since(t0);
  return {rate >= 100'000.0, fmt("%.0f env steps/s on one thread (target 100000)", rate)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"conservation", conservation},
      {"goal_switch_statistics", goal_switching},
      {"preset_expected_values", preset_values},
      {"annealing_endpoints", annealing},
      {"astar_bfs_equivalence", astar_oracle},
      {"step_oracle_equivalence", step_oracle},
      {"baseline_ordering", baselines},
      {"determinism", determinism},
      {"replay_fidelity", replay_fidelity},
      {"throughput", throughput},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
