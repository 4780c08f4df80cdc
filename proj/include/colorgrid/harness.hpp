#pragma once

#include <algorithm>
#include <barrier>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "colorgrid/config.hpp"
#include "colorgrid/env.hpp"
#include "colorgrid/observation.hpp"
#include "colorgrid/policies.hpp"
#include "colorgrid/rng.hpp"

namespace colorgrid {

/// Seed of the environment with global index `env_index` under `base_seed`.
/// Depends only on the global index so batching never changes an episode.
inline std::uint64_t env_seed(std::uint64_t base_seed, std::uint64_t env_index) noexcept {
  return derive_seed(base_seed, env_index);
}

inline std::uint64_t policy_seed(std::uint64_t env_seed_value, int agent) noexcept {
  return derive_seed(env_seed_value, 0x1000u + static_cast<std::uint64_t>(agent));
}

/// Runs fn(begin, end) over contiguous slices of [0, n) on persistent worker
/// threads. Each worker always receives the same slice.
class WorkerPool {
 public:
  WorkerPool(std::size_t n_items, std::size_t n_workers)
      : n_items_(n_items), n_workers_(std::max<std::size_t>(1, std::min(n_workers, std::max<std::size_t>(1, n_items)))),
        start_(static_cast<std::ptrdiff_t>(n_workers_)), done_(static_cast<std::ptrdiff_t>(n_workers_)) {
    for (std::size_t w = 1; w < n_workers_; ++w)
      threads_.emplace_back([this, w] {
        for (;;) {
          start_.arrive_and_wait();
          if (stop_) return;
          run_slice(w);
          done_.arrive_and_wait();
        }
      });
  }

  ~WorkerPool() {
    if (!threads_.empty()) {
      stop_ = true;
      start_.arrive_and_wait();
    }
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t workers() const noexcept { return n_workers_; }

  void run(const std::function<void(std::size_t, std::size_t)>& fn) {
    task_ = &fn;
    if (threads_.empty()) {
      run_slice(0);
      return;
    }
    start_.arrive_and_wait();
    run_slice(0);
    done_.arrive_and_wait();
  }

 private:
  void run_slice(std::size_t w) const {
    const std::size_t begin = n_items_ * w / n_workers_;
    const std::size_t end = n_items_ * (w + 1) / n_workers_;
    if (begin < end) (*task_)(begin, end);
  }

  std::size_t n_items_;
  std::size_t n_workers_;
  std::barrier<> start_;
  std::barrier<> done_;
  const std::function<void(std::size_t, std::size_t)>* task_ = nullptr;
  bool stop_ = false;
  std::vector<std::jthread> threads_;
};

/// A batch of independent environments stepped in lockstep.
///
/// global_timestep counts environment steps over all environments and all
/// history: each vector step adds num_envs(). Every environment in a vector
/// step sees the counter value from before the step.
class VecEnv {
 public:
  VecEnv(const EnvConfig& cfg, std::size_t n_envs, std::size_t n_workers = 1)
      : cfg_(cfg), pool_(n_envs, n_workers) {
    cfg_.validate();
    envs_.reserve(n_envs);
    for (std::size_t i = 0; i < n_envs; ++i) envs_.emplace_back(cfg_);
    outcomes_.resize(n_envs);
    reset(cfg_.seed);
  }

  std::size_t num_envs() const noexcept { return envs_.size(); }
  int num_agents() const noexcept { return cfg_.num_agents(); }
  const EnvConfig& config() const noexcept { return cfg_; }
  std::uint64_t global_timestep() const noexcept { return global_timestep_; }
  void set_global_timestep(std::uint64_t t) noexcept { global_timestep_ = t; }

  /// Environment i is reset with env_seed(base_seed, first_index + i).
  void reset(std::uint64_t base_seed, std::uint64_t first_index = 0) {
    for (std::size_t i = 0; i < envs_.size(); ++i) envs_[i].reset(env_seed(base_seed, first_index + i));
  }

  void reset_env(std::size_t i, std::uint64_t seed) { envs_.at(i).reset(seed); }

  /// `actions` holds num_agents() entries per environment, env-major.
  std::span<const StepOutcome> step(std::span<const Action> actions) {
    const auto per_env = static_cast<std::size_t>(num_agents());
    if (actions.size() != envs_.size() * per_env)
      throw std::invalid_argument("VecEnv::step: expected " + std::to_string(envs_.size() * per_env) +
                                  " actions, got " + std::to_string(actions.size()));
    const std::uint64_t t = global_timestep_;
    const std::function<void(std::size_t, std::size_t)> task = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i)
        outcomes_[i] = envs_[i].step(actions.subspan(i * per_env, per_env), t);
    };
    pool_.run(task);
    global_timestep_ += envs_.size();
    return outcomes_;
  }

  /// Writes every agent's observation planes, env-major then agent-major,
  /// into `planes` (uint8, channel/row/col layout) and goal vectors into
  /// `goals` (3 floats per agent).
  void observations(std::span<std::uint8_t> planes, std::span<float> goals) const {
    Observation obs;
    std::size_t p = 0;
    std::size_t g = 0;
    for (const auto& env : envs_)
      for (int a = 0; a < num_agents(); ++a) {
        encode_into(env.state(), a, cfg_, obs);
        if (p + obs.channels.size() > planes.size() || g + kNumColors > goals.size())
          throw std::invalid_argument("VecEnv::observations: output buffer too small");
        std::copy(obs.channels.begin(), obs.channels.end(), planes.begin() + static_cast<std::ptrdiff_t>(p));
        std::copy(obs.goal_vector.begin(), obs.goal_vector.end(), goals.begin() + static_cast<std::ptrdiff_t>(g));
        p += obs.channels.size();
        g += kNumColors;
      }
  }

  const Environment& env(std::size_t i) const { return envs_.at(i); }

 private:
  EnvConfig cfg_;
  std::vector<Environment> envs_;
  std::vector<StepOutcome> outcomes_;
  WorkerPool pool_;
  std::uint64_t global_timestep_ = 0;
};

/// Net unshaped reward over one evaluation window.
struct EpisodeMetrics {
  double sum_reward = 0.0;
  std::vector<double> per_agent_reward;
  double shaped_reward = 0.0;
  std::int64_t goal_collections = 0;
  std::int64_t incorrect_collections = 0;
  std::int64_t goal_switches = 0;
  std::uint64_t trajectory_hash = 0;
};

struct EvalReport {
  std::vector<EpisodeMetrics> episodes;  // seed-major, then env
  std::vector<double> seed_means;        // mean sum_reward of each batch
  double mean = 0.0;
  double stddev = 0.0;                   // sample std over all episodes
  double seed_stddev = 0.0;              // sample std over batch means
  std::vector<double> per_agent_mean;
  double mean_goal_collections = 0.0;
  double mean_incorrect_collections = 0.0;
  double mean_goal_switches = 0.0;
};

struct EvalSpec {
  std::string leader_policy = "astar_leader";
  std::string follower_policy = "astar_copier";
  std::size_t n_envs = 16;
  int horizon = 128;
  std::size_t n_seeds = 1;
  std::size_t n_threads = 1;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>(int agent)>;

/// Per-step hook used by the trajectory recorder.
using StepObserver = std::function<void(std::span<const Action>, const GridState&, const StepOutcome&)>;

inline std::uint64_t fold_hash(std::uint64_t h, std::uint64_t v) noexcept {
  return splitmix64(h ^ v) + 0x9E3779B97F4A7C15ull;
}

/// Runs one fixed-horizon episode. The trajectory hash chains the per-step
/// state hashes with the chosen actions.
inline EpisodeMetrics run_episode(const EnvConfig& cfg, std::uint64_t seed, const PolicyFactory& make,
                                  int horizon, std::uint64_t global_timestep = 0,
                                  const StepObserver& observer = {}) {
  const int n = cfg.num_agents();
  GridState s = reset(cfg, seed);
  std::vector<std::unique_ptr<Policy>> policies;
  policies.reserve(n);
  for (int a = 0; a < n; ++a) {
    policies.push_back(make(a));
    policies.back()->reset(s, cfg, a, policy_seed(seed, a));
  }
  EpisodeMetrics m;
  m.per_agent_reward.assign(n, 0.0);
  m.trajectory_hash = state_hash(s);
  std::vector<Action> actions(n);
  StepOutcome out;
  for (int t = 0; t < horizon; ++t) {
    for (int a = 0; a < n; ++a) actions[a] = policies[a]->act(s);
    step(s, cfg, actions, global_timestep, out);
    for (auto& p : policies) p->observe(s, out);
    for (int a = 0; a < n; ++a) {
      m.per_agent_reward[a] += out.base_rewards[a];
      m.sum_reward += out.base_rewards[a];
      m.shaped_reward += out.shaped_rewards[a];
    }
    for (const auto& c : out.collections) (c.was_goal ? m.goal_collections : m.incorrect_collections) += 1;
    m.goal_switches += out.goal_switched ? 1 : 0;
    for (Action act : actions) m.trajectory_hash = fold_hash(m.trajectory_hash, static_cast<std::uint64_t>(act));
    m.trajectory_hash = fold_hash(m.trajectory_hash, state_hash(s));
    if (observer) observer(actions, s, out);
  }
  return m;
}

inline PolicyFactory role_factory(const EnvConfig& cfg, std::string leader, std::string follower) {
  for (const auto* name : {&leader, &follower})
    if (!make_policy(*name)) throw ConfigError("unknown policy '" + *name + "'");
  return [leaders = cfg.num_leaders, leader = std::move(leader), follower = std::move(follower)](int agent) {
    return make_policy(agent < leaders ? leader : follower);
  };
}

/// Evaluation protocol: n_seeds batches of n_envs environments, each run for
/// `horizon` steps. The penalty is always at full strength and the headline
/// metric ignores shaping. Episode (seed b, env e) uses env_seed(cfg.seed,
/// b * n_envs + e), so results do not depend on n_threads.
inline EvalReport evaluate(EnvConfig cfg, const EvalSpec& spec, const PolicyFactory& make) {
  if (spec.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (spec.n_envs < 1 || spec.n_seeds < 1) throw ConfigError("n_envs and n_seeds must be positive");
  cfg.shaping.anneal.reset();
  cfg.validate();

  const std::size_t total = spec.n_envs * spec.n_seeds;
  EvalReport r;
  r.episodes.resize(total);
  {
    WorkerPool pool(total, spec.n_threads);
    pool.run([&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i)
        r.episodes[i] = run_episode(cfg, env_seed(cfg.seed, i), make, spec.horizon);
    });
  }

  const int n_agents = cfg.num_agents();
  r.per_agent_mean.assign(n_agents, 0.0);
  for (const auto& e : r.episodes) {
    r.mean += e.sum_reward;
    for (int a = 0; a < n_agents; ++a) r.per_agent_mean[a] += e.per_agent_reward[a];
    r.mean_goal_collections += static_cast<double>(e.goal_collections);
    r.mean_incorrect_collections += static_cast<double>(e.incorrect_collections);
    r.mean_goal_switches += static_cast<double>(e.goal_switches);
  }
  const auto nd = static_cast<double>(total);
  r.mean /= nd;
  for (auto& v : r.per_agent_mean) v /= nd;
  r.mean_goal_collections /= nd;
  r.mean_incorrect_collections /= nd;
  r.mean_goal_switches /= nd;

  auto sample_std = [](const std::vector<double>& xs, double mu) {
    if (xs.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
  };
  std::vector<double> sums;
  sums.reserve(total);
  for (const auto& e : r.episodes) sums.push_back(e.sum_reward);
  r.stddev = sample_std(sums, r.mean);
  for (std::size_t b = 0; b < spec.n_seeds; ++b) {
    double acc = 0.0;
    for (std::size_t e = 0; e < spec.n_envs; ++e) acc += sums[b * spec.n_envs + e];
    r.seed_means.push_back(acc / static_cast<double>(spec.n_envs));
  }
  r.seed_stddev = sample_std(r.seed_means, r.mean);
  return r;
}

inline EvalReport evaluate(const EnvConfig& cfg, const EvalSpec& spec) {
  return evaluate(cfg, spec, role_factory(cfg, spec.leader_policy, spec.follower_policy));
}

inline nlohmann::json to_json(const EvalReport& r) {
  return {{"mean_sum_reward", r.mean},
          {"std_sum_reward", r.stddev},
          {"std_seed_mean", r.seed_stddev},
          {"per_agent_mean", r.per_agent_mean},
          {"mean_goal_collections", r.mean_goal_collections},
          {"mean_incorrect_collections", r.mean_incorrect_collections},
          {"mean_goal_switches", r.mean_goal_switches},
          {"episodes", r.episodes.size()}};
}

}  // namespace colorgrid
