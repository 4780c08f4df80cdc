#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "colorgrid/render.hpp"
#include "colorgrid/trajectory.hpp"
#include "reference_sim.hpp"
#include "test_util.hpp"

using namespace colorgrid;

namespace {

TrajectoryRecord sample_record(std::uint64_t seed = 5, int horizon = 40) {
  EnvConfig cfg;
  cfg.apply_preset(kNeutral);
  cfg.shaping.potential_field = PotentialField{};
  cfg.shaping.distance = DistanceShaping{};
  return record_episode(cfg, seed, "astar_leader", "astar_copier", horizon);
}

// Byte offset of the start of line `n` (0-based).
std::size_t line_offset(const std::string& text, int n) {
  std::size_t pos = 0;
  for (int i = 0; i < n; ++i) pos = text.find('\n', pos) + 1;
  return pos;
}

}  // namespace

TEST(Trajectory, RecordReplayHashes) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rec = sample_record(seed, 128);
    const auto states = replay(rec);
    ASSERT_EQ(states.size(), rec.steps.size() + 1);
    for (std::size_t t = 0; t < rec.steps.size(); ++t) EXPECT_EQ(state_hash(states[t + 1]), rec.steps[t].hash);
  }
}

TEST(Trajectory, TextRoundTrip) {
  const auto rec = sample_record();
  const std::string text = to_string(rec);
  const auto back = parse_trajectory(text);
  EXPECT_EQ(back.header.config, rec.header.config);
  EXPECT_EQ(back.header.seed, rec.header.seed);
  EXPECT_EQ(back.header.leader_policy, "astar_leader");
  EXPECT_EQ(back.steps, rec.steps);
  EXPECT_EQ(to_string(back), text);
  EXPECT_NO_THROW(replay(back));
}

TEST(Trajectory, TruncatedMidEntryNamesStep) {
  const std::string text = to_string(sample_record());
  const std::size_t cut = line_offset(text, 8) + 20;  // inside step 7
  try {
    parse_trajectory(text.substr(0, cut));
    FAIL() << "expected a parse error";
  } catch (const TrajectoryParseError& e) {
    EXPECT_EQ(e.step_index(), 7);
    EXPECT_EQ(e.byte_offset(), line_offset(text, 8));
    EXPECT_NE(std::string(e.what()).find("step 7"), std::string::npos);
  }
}

TEST(Trajectory, MissingStepsReported) {
  const std::string text = to_string(sample_record());
  try {
    parse_trajectory(text.substr(0, line_offset(text, 11)));
    FAIL() << "expected a parse error";
  } catch (const TrajectoryParseError& e) {
    EXPECT_EQ(e.step_index(), 10);
    EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
  }
}

TEST(Trajectory, VersionMismatchRejected) {
  std::string text = to_string(sample_record());
  const auto pos = text.find("\"version\":1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 11, "\"version\":2");
  try {
    parse_trajectory(text);
    FAIL() << "expected a parse error";
  } catch (const TrajectoryParseError& e) {
    EXPECT_EQ(e.step_index(), -1);
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  EXPECT_THROW(parse_trajectory(""), TrajectoryParseError);
  EXPECT_THROW(parse_trajectory("{\"format\":\"other\"}\n"), TrajectoryParseError);
}

TEST(Trajectory, TamperedRecordFailsReplay) {
  auto rec = sample_record();
  rec.steps[12].actions[0] = rec.steps[12].actions[0] == Action::Up ? Action::Down : Action::Up;
  try {
    replay(rec);
    FAIL() << "expected a mismatch";
  } catch (const ReplayMismatch& e) {
    EXPECT_EQ(e.step_index(), 12);
  }
  auto rec2 = sample_record();
  rec2.steps[3].base_rewards[0] += 1.0;
  EXPECT_THROW(replay(rec2), ReplayMismatch);
}

TEST(Trajectory, ReplayMatchesReferenceSimulator) {
  EnvConfig cfg = testutil::small_config(5, 5, 0.25);
  cfg.apply_preset(kNeutral);
  cfg.goal_resample_probability = 0.2;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rec = record_episode(cfg, seed, "astar_leader", "random", 64);
    const auto states = replay(parse_trajectory(to_string(rec)));
    refsim::World w = refsim::from_state(states[0]);
    for (std::size_t t = 0; t < rec.steps.size(); ++t) {
      std::vector<int> acts;
      for (auto a : rec.steps[t].actions) acts.push_back(static_cast<int>(a));
      refsim::step(w, cfg, acts, 0);
      for (std::size_t i = 0; i < w.pos.size(); ++i) {
        ASSERT_EQ(w.pos[i].first, rec.steps[t].agents[i].row);
        ASSERT_EQ(w.pos[i].second, rec.steps[t].agents[i].col);
      }
      ASSERT_EQ(w.goal, rec.steps[t].goal.index);
    }
  }
}

TEST(Render, AsciiFrame) {
  GridState s;
  s.width = 3;
  s.height = 2;
  s.cells = {0, kEmpty, 2, kEmpty, 1, kEmpty};
  s.agents = {{0, 1}, {1, 2}};
  s.goal = BlockColor(2);
  s.timestep = 4;
  std::ostringstream os;
  render_frame(s, EnvConfig{}, os);
  EXPECT_EQ(os.str(), "t=4 goal=2\n0L2\n.1F\n");
  std::ostringstream ansi;
  render_frame(s, EnvConfig{}, ansi, true);
  EXPECT_NE(ansi.str().find("\x1b[7m2\x1b[0m"), std::string::npos);
}
