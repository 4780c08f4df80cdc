// colorgrid: evaluate baselines, replay trajectories, benchmark throughput.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "colorgrid/colorgrid.hpp"

namespace {

using colorgrid::EnvConfig;

// Raw flag values; converted into an EnvConfig only after parsing finishes.
struct EnvFlags {
  int width = 32;
  int height = 32;
  double density = 0.10;
  std::optional<std::string> preset;
  std::optional<double> reward_goal;
  std::optional<double> reward_incorrect;
  double switch_prob = 1.0 / 32.0;
  bool asymmetric = false;
  int leaders = 1;
  int followers = 1;
  std::optional<std::uint64_t> anneal_start;
  std::optional<std::uint64_t> anneal_end;
  std::optional<int> distance_threshold;
  std::optional<double> distance_penalty;
  std::string distance_target = "follower";
  bool potential_field = false;
  std::optional<double> potential_scale;
  int potential_radius = 10;
  std::optional<int> warmstart;
  int view_radius = 0;
};

struct RunSpec {
  EnvFlags env;
  std::optional<std::uint64_t> seed;
  std::string leader = "astar_leader";
  std::string follower = "astar_copier";
  std::size_t seeds = 1;
  std::size_t envs = 16;
  int horizon = 128;
  std::size_t threads = 1;
  std::string record_path;
  std::string output_path;
  std::string replay_path;
  std::optional<int> frame;
  int delay_ms = 0;
  bool ansi = false;
  std::string config_path;
};

void add_env_flags(CLI::App& cmd, EnvFlags& f) {
  cmd.add_option("--width", f.width, "Grid width in cells")->check(CLI::PositiveNumber);
  cmd.add_option("--height", f.height, "Grid height in cells")->check(CLI::PositiveNumber);
  cmd.add_option("--density", f.density, "Fraction of cells holding blocks");
  cmd.add_option("--preset", f.preset, "Reward preset")
      ->check(CLI::IsMember({"optimistic", "neutral", "pessimistic"}));
  cmd.add_option("--reward-goal", f.reward_goal, "Goal block reward (overrides preset)");
  cmd.add_option("--reward-incorrect", f.reward_incorrect, "Incorrect block reward (overrides preset)");
  cmd.add_option("--switch-prob", f.switch_prob, "Per-step goal resample probability");
  cmd.add_flag("--asymmetric", f.asymmetric, "Hide the goal from followers");
  cmd.add_option("--leaders", f.leaders, "Number of leader agents")->check(CLI::PositiveNumber);
  cmd.add_option("--followers", f.followers, "Number of follower agents")->check(CLI::PositiveNumber);
  cmd.add_option("--anneal-start", f.anneal_start, "Global step where the penalty ramp starts");
  cmd.add_option("--anneal-end", f.anneal_end, "Global step where the penalty reaches full strength");
  cmd.add_option("--distance-threshold", f.distance_threshold, "Distance shaping threshold (Manhattan)");
  cmd.add_option("--distance-penalty", f.distance_penalty, "Distance shaping penalty per step");
  cmd.add_option("--distance-target", f.distance_target, "Role receiving the distance penalty")
      ->check(CLI::IsMember({"leader", "follower", "both"}));
  cmd.add_flag("--potential-field", f.potential_field, "Enable potential-field shaping");
  cmd.add_option("--potential-scale", f.potential_scale, "Potential-field scale k (default: derived)");
  cmd.add_option("--potential-radius", f.potential_radius, "Potential-field cutoff radius");
  cmd.add_option("--warmstart", f.warmstart, "Warmstart shaping preset")->check(CLI::IsMember({1, 2}));
  cmd.add_option("--view-radius", f.view_radius, "Egocentric observation radius (0 = full)");
}

EnvConfig build_config(const EnvFlags& f, std::uint64_t seed) {
  EnvConfig c;
  c.width = f.width;
  c.height = f.height;
  c.block_density = f.density;
  if (f.preset) c.apply_preset(*colorgrid::preset_from_name(*f.preset));
  if (f.reward_goal) c.reward_goal = *f.reward_goal;
  if (f.reward_incorrect) c.reward_incorrect = *f.reward_incorrect;
  c.goal_resample_probability = f.switch_prob;
  c.asymmetric = f.asymmetric;
  c.num_leaders = f.leaders;
  c.num_followers = f.followers;
  c.view_radius = f.view_radius;
  c.seed = seed;
  if (f.warmstart) c.shaping = colorgrid::warmstart_shaping(*f.warmstart);
  if (f.anneal_start || f.anneal_end) {
    colorgrid::AnnealSchedule a = c.shaping.anneal.value_or(colorgrid::AnnealSchedule{});
    if (f.anneal_start) a.start = *f.anneal_start;
    if (f.anneal_end) a.end = *f.anneal_end;
    c.shaping.anneal = a;
  }
  if (f.distance_threshold || f.distance_penalty) {
    colorgrid::DistanceShaping d = c.shaping.distance.value_or(colorgrid::DistanceShaping{});
    if (f.distance_threshold) d.threshold = *f.distance_threshold;
    if (f.distance_penalty) d.penalty = *f.distance_penalty;
    d.applies_to = *colorgrid::target_from_name(f.distance_target);
    c.shaping.distance = d;
  }
  if (f.potential_field || f.potential_scale)
    c.shaping.potential_field = colorgrid::PotentialField{f.potential_scale, f.potential_radius};
  c.validate();
  return c;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Expands "key = value" lines of a config file into "--key value" arguments.
// They are placed before the user's own flags so the command line wins.
std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ConversionError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value == "true") {
      args.push_back("--" + key);
    } else if (value != "false") {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  return args;
}

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  for (std::size_t i = 1; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    auto extra = config_file_args(args[i + 1]);
    std::vector<std::string> out(args.begin(), args.begin() + 2);  // program, subcommand
    out.insert(out.end(), extra.begin(), extra.end());
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
  }
  return args;
}

nlohmann::json header_json(const std::string& command, const EnvConfig& cfg, const RunSpec& r) {
  return {{"type", "header"},
          {"command", command},
          {"version", PROJECT_VERSION},
          {"seed", cfg.seed},
          {"config", colorgrid::to_json(cfg)},
          {"policies", {{"leader", r.leader}, {"follower", r.follower}}},
          {"envs", r.envs},
          {"horizon", r.horizon},
          {"seeds", r.seeds}};
}

int cmd_evaluate(const RunSpec& r) {
  const EnvConfig cfg = build_config(r.env, resolve_seed(r.seed));
  std::ofstream file;
  if (!r.output_path.empty()) {
    file.open(r.output_path);
    if (!file) throw CLI::FileError("cannot open " + r.output_path);
  }
  std::ostream& out = r.output_path.empty() ? std::cout : file;
  out << header_json("evaluate", cfg, r).dump() << '\n';

  colorgrid::EvalSpec spec{r.leader, r.follower, r.envs, r.horizon, r.seeds, r.threads};
  const auto report = colorgrid::evaluate(cfg, spec);
  for (std::size_t b = 0; b < report.seed_means.size(); ++b)
    out << nlohmann::json{{"type", "batch"}, {"batch", b}, {"mean_sum_reward", report.seed_means[b]}}.dump()
        << '\n';
  auto summary = colorgrid::to_json(report);
  summary["type"] = "metrics";
  out << summary.dump() << '\n';

  if (!r.record_path.empty()) {
    // The recorded episode is episode 0 of the evaluation.
    auto eval_cfg = cfg;
    eval_cfg.shaping.anneal.reset();
    const auto rec = colorgrid::record_episode(eval_cfg, colorgrid::env_seed(cfg.seed, 0), r.leader,
                                               r.follower, r.horizon);
    std::ofstream rf(r.record_path);
    if (!rf) throw CLI::FileError("cannot open " + r.record_path);
    colorgrid::write_trajectory(rec, rf);
  }
  return 0;
}

int cmd_replay(const RunSpec& r) {
  std::ifstream in(r.replay_path);
  if (!in) throw CLI::FileError::Missing(r.replay_path);
  const auto rec = colorgrid::read_trajectory(in);
  const auto states = colorgrid::replay(rec);
  const auto& cfg = rec.header.config;
  const int frames = static_cast<int>(rec.steps.size());
  if (r.frame && (*r.frame < 1 || *r.frame > frames)) {
    std::cerr << "--step must lie in [1, " << frames << "]\n";
    return 2;
  }
  // Frame t (1-based) is the state after step t.
  for (int t = 1; t <= frames; ++t) {
    if (r.frame && *r.frame != t) continue;
    const auto& st = rec.steps[t - 1];
    std::cout << "frame " << t << " actions ";
    for (auto a : st.actions) std::cout << colorgrid::action_char(a);
    std::cout << " collections " << st.collections.size() << (st.goal_switched ? " goal-switch" : "") << '\n';
    colorgrid::render_frame(states[t], cfg, std::cout, r.ansi);
    if (r.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(r.delay_ms));
  }
  return 0;
}

int cmd_bench(const RunSpec& r) {
  const EnvConfig cfg = build_config(r.env, resolve_seed(r.seed));
  RunSpec shown = r;
  shown.leader = shown.follower = "random";
  std::cout << header_json("bench", cfg, shown).dump() << '\n';

  colorgrid::VecEnv vec(cfg, r.envs, r.threads);
  const int n_agents = cfg.num_agents();
  std::vector<colorgrid::Engine> rngs;
  for (std::size_t e = 0; e < r.envs; ++e) rngs.emplace_back(colorgrid::derive_seed(cfg.seed, 0xBE7C + e));
  std::vector<colorgrid::Action> actions(r.envs * n_agents);

  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < r.horizon; ++t) {
    for (std::size_t e = 0; e < r.envs; ++e)
      for (int a = 0; a < n_agents; ++a) actions[e * n_agents + a] = colorgrid::RandomPolicy::random_act(rngs[e]);
    vec.step(actions);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double total = static_cast<double>(r.envs) * r.horizon;
  std::cout << nlohmann::json{{"type", "bench"},
                              {"env_steps", total},
                              {"seconds", secs},
                              {"steps_per_second", total / secs},
                              {"steps_per_second_per_env", total / secs / static_cast<double>(r.envs)},
                              {"threads", r.threads}}
                   .dump()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ColorGrid multi-agent environment: baselines, replay and benchmarks"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  RunSpec r;

  const std::vector<std::string> policies(colorgrid::kPolicyNames.begin(), colorgrid::kPolicyNames.end());

  auto* eval = app.add_subcommand("evaluate", "Run policies and report net reward per window");
  add_env_flags(*eval, r.env);
  eval->add_option("--seed", r.seed, "Base seed (drawn from entropy when absent)");
  eval->add_option("--leader", r.leader, "Leader policy")->check(CLI::IsMember(policies));
  eval->add_option("--follower", r.follower, "Follower policy")->check(CLI::IsMember(policies));
  eval->add_option("--seeds", r.seeds, "Number of environment batches")->check(CLI::PositiveNumber);
  eval->add_option("--envs", r.envs, "Environments per batch")->check(CLI::PositiveNumber);
  eval->add_option("--horizon", r.horizon, "Steps per episode")->check(CLI::PositiveNumber);
  eval->add_option("--threads", r.threads, "Worker threads")->check(CLI::PositiveNumber);
  eval->add_option("--record", r.record_path, "Write the first episode as a trajectory file");
  eval->add_option("--output", r.output_path, "Write metrics here instead of stdout");
  eval->add_option("--config", r.config_path, "Flat key = value file of flag defaults");

  auto* rep = app.add_subcommand("replay", "Re-simulate and render a recorded trajectory");
  rep->add_option("--replay,trajectory", r.replay_path, "Trajectory file")->required();
  rep->add_option("--step", r.frame, "Print only this frame (1-based)");
  rep->add_option("--delay", r.delay_ms, "Milliseconds between frames")->check(CLI::NonNegativeNumber);
  rep->add_flag("--ansi", r.ansi, "Highlight goal blocks with ANSI reverse video");

  auto* bench = app.add_subcommand("bench", "Measure environment steps per second with random policies");
  add_env_flags(*bench, r.env);
  bench->add_option("--seed", r.seed, "Base seed (drawn from entropy when absent)");
  bench->add_option("--envs", r.envs, "Number of environments")->check(CLI::PositiveNumber);
  bench->add_option("--horizon", r.horizon, "Steps per environment")->check(CLI::PositiveNumber);
  bench->add_option("--threads", r.threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--config", r.config_path, "Flat key = value file of flag defaults");
  r.envs = 16;
  r.horizon = 128;

  try {
    auto args = expand_config(argc, argv);
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  // bench defaults to a longer run than an evaluation window.
  if (bench->parsed() && bench->get_option("--horizon")->count() == 0) r.horizon = 100'000;
  if (bench->parsed() && bench->get_option("--envs")->count() == 0) r.envs = 1;

  try {
    if (eval->parsed()) return cmd_evaluate(r);
    if (rep->parsed()) return cmd_replay(r);
    if (bench->parsed()) return cmd_bench(r);
  } catch (const colorgrid::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
