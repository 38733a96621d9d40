#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "ovmm/agent/fsm.hpp"
#include "ovmm/agent/occupancy.hpp"
#include "ovmm/agent/scripted.hpp"
#include "ovmm/agent/skill.hpp"
#include "ovmm/harness/simulation.hpp"
#include "support/fixtures.hpp"

namespace ovmm {
namespace {

using namespace ovmm::agent;
using task::Phase;
using Status = task::SkillOutcome::Status;

TEST(Fsm, TransitionsInOrder) {
  const SkillOutcome stopped{Status::Stopped, 3};
  EXPECT_EQ(high_level_step({Phase::NavToObj, 0, 5}, stopped, false).phase, Phase::Gaze);
  EXPECT_EQ(high_level_step({Phase::Gaze, 0, 5}, stopped, true).phase, Phase::NavToRec);
  const auto retry = high_level_step({Phase::Gaze, 2, 5}, stopped, false);
  EXPECT_EQ(retry.phase, Phase::NavToObj);
  EXPECT_EQ(retry.retry_count, 3);
  EXPECT_EQ(high_level_step({Phase::NavToRec, 0, 5}, stopped, true).phase, Phase::Place);
  EXPECT_EQ(high_level_step({Phase::Place, 0, 5}, stopped, false).phase, Phase::Done);
}

TEST(Fsm, DoneIsAbsorbingAndBudgetEndsEverything) {
  for (auto p : {Phase::NavToObj, Phase::Gaze, Phase::NavToRec, Phase::Place, Phase::Done}) {
    EXPECT_EQ(high_level_step({p, 0, 0}, {}, false, true, true).phase, Phase::Done);
    for (bool holding : {false, true}) {
      for (bool retry : {false, true}) {
        const auto next = high_level_step({p, 0, 0}, {}, holding, retry);
        if (p == Phase::Done) EXPECT_EQ(next.phase, Phase::Done);
        // The only backward edge is Gaze -> NavToObj.
        if (next.phase < p && p != Phase::Done) {
          EXPECT_EQ(p, Phase::Gaze);
          EXPECT_EQ(next.phase, Phase::NavToObj);
        }
      }
    }
  }
}

TEST(Fsm, BaselineModeMatchesRetryWhenFirstPickSucceeds) {
  FsmState a;
  FsmState b;
  for (int k = 0; k < 4; ++k) {
    a = high_level_step(a, {}, k >= 1, true);
    b = high_level_step(b, {}, k >= 1, false);
    EXPECT_EQ(a, b);
  }
  EXPECT_EQ(high_level_step({Phase::Gaze, 0, 0}, {}, false, false).phase, Phase::NavToRec);
}

struct StopAtOnce : Skill {
  world::Action act(const Observation&) override { return world::action::Stop{}; }
};

struct NeverStop : Skill {
  world::Action act(const Observation&) override { return world::action::TurnLeft{}; }
};

// Counts steps and fakes the gripper: the first `failures` gaze invocations
// come back empty-handed.
class StubEnv : public EpisodeEnv {
 public:
  explicit StubEnv(int failures) : failures_(failures) {}

  Observation observe() override { return {}; }
  void step(const world::Action& a) override {
    ++steps_;
    if (phase_ == Phase::Gaze && world::is_stop(a) && ++gaze_calls_ > failures_) holding_ = true;
  }
  void begin_phase(Phase p) override {
    phase_ = p;
    if (p == Phase::NavToObj) ++nav_to_obj_entries;
  }
  bool check_phase(Phase p) override { return p == Phase::Gaze ? holding_ : true; }
  bool holding() const override { return holding_; }
  int steps_taken() const override { return steps_; }
  void record_skill(const task::SkillRecord& r) override { records.push_back(r); }

  int nav_to_obj_entries = 0;
  std::vector<task::SkillRecord> records;

 private:
  int failures_;
  Phase phase_ = Phase::NavToObj;
  int steps_ = 0;
  int gaze_calls_ = 0;
  bool holding_ = false;
};

SkillSet stop_skills() {
  SkillSet s;
  s.nav_to_obj = std::make_unique<StopAtOnce>();
  s.gaze = std::make_unique<StopAtOnce>();
  s.nav_to_rec = std::make_unique<StopAtOnce>();
  s.place = std::make_unique<StopAtOnce>();
  return s;
}

TEST(RunSkill, StopCountsAsAStep) {
  StubEnv env(0);
  StopAtOnce skill;
  EXPECT_EQ(run_skill(skill, env, 10), (SkillOutcome{Status::Stopped, 1}));
}

TEST(RunSkill, BudgetExhaustion) {
  StubEnv env(0);
  NeverStop skill;
  EXPECT_EQ(run_skill(skill, env, 50), (SkillOutcome{Status::BudgetExhausted, 50}));
}

TEST(RunEpisode, RetryLoopRevisitsNavigationOncePerFailedPick) {
  for (int k = 0; k <= 5; ++k) {
    StubEnv env(k);
    auto skills = stop_skills();
    const auto end = run_episode(env, skills, AgentConfig{}, 2000);
    EXPECT_EQ(end.phase, Phase::Done);
    EXPECT_EQ(end.retry_count, k);
    EXPECT_EQ(env.nav_to_obj_entries, k + 1);
    ASSERT_FALSE(env.records.empty());
    EXPECT_EQ(env.records.back().phase, Phase::Place);
    EXPECT_TRUE(env.records.back().check);
  }
}

TEST(RunEpisode, WithoutRetryAFailedPickCarriesOn) {
  StubEnv env(2);
  auto skills = stop_skills();
  AgentConfig cfg;
  cfg.retry_loop = false;
  const auto end = run_episode(env, skills, cfg, 2000);
  EXPECT_EQ(end.phase, Phase::Done);
  EXPECT_EQ(env.nav_to_obj_entries, 1);
  ASSERT_EQ(env.records.size(), 4u);
  EXPECT_FALSE(env.records[1].check);
}

TEST(RunEpisode, SkillCutByEpisodeBudgetFailsItsCheck) {
  StubEnv env(0);
  SkillSet s = stop_skills();
  s.nav_to_obj = std::make_unique<NeverStop>();
  const auto end = run_episode(env, s, AgentConfig{}, 30);
  EXPECT_EQ(end.phase, Phase::Done);
  ASSERT_EQ(env.records.size(), 1u);
  EXPECT_FALSE(env.records[0].check);
  EXPECT_EQ(env.steps_taken(), 30);
}

// Independent shortest-path oracle: Dijkstra over a boolean grid with the same
// 8-connected moves (diagonals may not cut a blocked corner).
double oracle_cost(int rows, int cols, const std::vector<std::uint8_t>& blocked, GridCell s,
                   const std::function<bool(GridCell)>& is_goal) {
  const auto idx = [&](int r, int c) { return static_cast<std::size_t>(r * cols + c); };
  std::vector<double> dist(static_cast<std::size_t>(rows * cols), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::pair<int, int>>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[idx(s.row, s.col)] = 0.0;
  open.push({0.0, {s.row, s.col}});
  while (!open.empty()) {
    const auto [d, rc] = open.top();
    open.pop();
    const auto [r, c] = rc;
    if (d > dist[idx(r, c)]) continue;
    if (is_goal({r, c})) return d;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int nr = r + dr;
        const int nc = c + dc;
        if (nr < 0 || nr >= rows || nc < 0 || nc >= cols || blocked[idx(nr, nc)]) continue;
        if (dr != 0 && dc != 0 && (blocked[idx(nr, c)] || blocked[idx(r, nc)])) continue;
        const double nd = d + std::hypot(dr, dc);
        if (nd < dist[idx(nr, nc)]) {
          dist[idx(nr, nc)] = nd;
          open.push({nd, {nr, nc}});
        }
      }
    }
  }
  return std::numeric_limits<double>::infinity();
}

TEST(Occupancy, PlanLengthMatchesOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    OccupancyGrid g({0.0, 0.0, 3.0, 2.0}, 0.1);
    std::vector<std::uint8_t> blocked(static_cast<std::size_t>(g.rows() * g.cols()), 0);
    for (auto& b : blocked) b = rng.bernoulli(0.25) ? 1 : 0;
    const GridCell s{rng.uniform_int(0, g.rows() - 1), rng.uniform_int(0, g.cols() - 1)};
    const GridCell t{rng.uniform_int(0, g.rows() - 1), rng.uniform_int(0, g.cols() - 1)};
    blocked[static_cast<std::size_t>(s.row * g.cols() + s.col)] = 0;
    blocked[static_cast<std::size_t>(t.row * g.cols() + t.col)] = 0;
    const auto is_goal = [&](GridCell c) { return c == t; };
    const double want = oracle_cost(g.rows(), g.cols(), blocked, s, is_goal);
    const auto path = g.plan(g.center_of(s), is_goal, blocked);
    if (!std::isfinite(want)) {
      EXPECT_FALSE(path.has_value());
      continue;
    }
    ASSERT_TRUE(path.has_value());
    EXPECT_EQ(g.cell_of(path->back()), t);
    EXPECT_NEAR(path_length(*path), want * 0.1, 1e-9);
  }
}

harness::RunConfig ground_truth_config() {
  harness::RunConfig cfg;
  cfg.perception = harness::PerceptionMode::GroundTruth;
  return cfg;
}

Observation facing(Pose2 pose, const world::Frame& f, const perception::LabelMap& l,
                   const world::CameraConfig& cam) {
  Observation obs;
  obs.frame = &f;
  obs.labels = &l;
  obs.camera = &cam;
  obs.pose = pose;
  obs.map_bounds = {0.0, 0.0, 6.0, 6.0};
  return obs;
}

TEST(NavSkill, HeadsStraightForVisibleTargetAndTurnsTowardsSideTarget) {
  auto scene = testing::empty_room(6.0, 6.0);
  testing::add_receptacle(scene, testing::kTable, {3.5, 2.6, 4.3, 3.4}, 0.7);
  const world::CameraConfig cam;
  NavSkill::Config cfg;
  cfg.initial_spin = 0;

  world::AgentState ahead;
  ahead.base = {1.5, 3.0, 0.0};
  auto f = world::render(scene, ahead, cam);
  auto l = perception::ground_truth_labels(f);
  NavSkill nav(testing::kTable, NavSkill::TargetKind::Receptacle, cfg);
  nav.begin();
  EXPECT_TRUE(std::holds_alternative<world::action::Forward>(nav.act(facing(ahead.base, f, l, cam))));
  EXPECT_TRUE(std::holds_alternative<world::action::Forward>(nav.act(facing(ahead.base, f, l, cam))));

  // Table 90 degrees to the left: it is out of view, but the earlier sighting
  // is remembered.
  const Pose2 side{1.5, 3.0, -kPi / 2.0};
  world::AgentState turned;
  turned.base = side;
  f = world::render(scene, turned, cam);
  l = perception::ground_truth_labels(f);
  EXPECT_TRUE(std::holds_alternative<world::action::TurnLeft>(nav.act(facing(side, f, l, cam))));
}

TEST(NavSkill, MazeWithinTwiceTheShortestPath) {
  auto scene = testing::empty_room(8.0, 5.0);
  scene.walls.push_back({{4.0, 0.0}, {4.0, 3.6}});
  testing::add_receptacle(scene, testing::kTable, {6.5, 0.5, 7.3, 1.3}, 0.7);
  const auto rec = scene.receptacles[0].footprint;
  const Pose2 start{1.0, 1.0, 0.0};
  const auto cfg = ground_truth_config();
  const auto ep = testing::make_episode(testing::kCup, testing::kCounter, testing::kTable, start);

  // Oracle on a 5 cm grid of collision-free base positions.
  const double res = 0.05;
  const int rows = static_cast<int>(5.0 / res);
  const int cols = static_cast<int>(8.0 / res);
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(rows * cols), 0);
  auto center = [&](GridCell c) { return Vec2{(c.col + 0.5) * res, (c.row + 0.5) * res}; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      blocked[static_cast<std::size_t>(r * cols + c)] = world::base_blocked(scene, center({r, c}), 0.2) ? 1 : 0;
    }
  }
  const GridCell s{static_cast<int>(start.y / res), static_cast<int>(start.x / res)};
  const double optimal_m =
      res * oracle_cost(rows, cols, blocked, s, [&](GridCell c) { return rec.distance_to(center(c)) <= 1.0; });
  ASSERT_TRUE(std::isfinite(optimal_m));
  const int optimal_steps = static_cast<int>(std::ceil(optimal_m / cfg.world.forward_step));

  harness::SimEnv env(cfg, ep, scene, 3);
  env.begin_phase(Phase::NavToRec);
  NavSkill nav(testing::kTable, NavSkill::TargetKind::Receptacle);
  nav.begin();
  int steps = 0;
  while (steps < 4 * optimal_steps && rec.distance_to(env.agent_state().base.position()) > 1.0) {
    env.step(nav.act(env.observe()));
    ++steps;
  }
  EXPECT_LE(rec.distance_to(env.agent_state().base.position()), 1.0);
  EXPECT_LE(steps, 2 * optimal_steps) << "optimal " << optimal_steps;
}

int drive_until_stop(harness::SimEnv& env, NavSkill& nav, int limit) {
  for (int steps = 1; steps <= limit; ++steps) {
    const auto a = nav.act(env.observe());
    env.step(a);
    if (std::holds_alternative<world::action::Stop>(a)) return steps;
  }
  return -1;
}

TEST(NavSkill, HandedBackTargetIsApproachedFromANewSpot) {
  auto scene = testing::empty_room(6.0, 6.0);
  testing::add_receptacle(scene, testing::kTable, {3.5, 2.6, 4.3, 3.4}, 0.7);
  const auto cfg = ground_truth_config();
  const auto ep = testing::make_episode(testing::kCup, testing::kCounter, testing::kTable, {1.0, 3.0, 0.0});
  harness::SimEnv env(cfg, ep, scene, 5);
  env.begin_phase(Phase::NavToRec);
  NavSkill nav(testing::kTable, NavSkill::TargetKind::Receptacle);

  nav.begin();
  ASSERT_GT(drive_until_stop(env, nav, 200), 0);
  const Vec2 first = env.agent_state().base.position();
  nav.begin();
  ASSERT_GT(drive_until_stop(env, nav, 200), 0);
  const Vec2 second = env.agent_state().base.position();
  EXPECT_GE(distance(first, second), NavSkill::Config{}.fresh_standpoint);
  EXPECT_LE(scene.receptacles[0].footprint.distance_to(second), 1.0);
}

TEST(NavSkill, SqueezesOutOfAGapNarrowerThanTheSafetyMargin) {
  auto scene = testing::empty_room(8.0, 6.0);
  scene.walls.push_back({{6.0, 0.0}, {6.0, 4.0}});
  testing::add_receptacle(scene, testing::kCabinet, {0.5, 0.5, 5.5, 4.0}, 0.9);
  testing::add_receptacle(scene, testing::kTable, {1.0, 5.0, 2.0, 5.6}, 0.7);
  const auto rec = scene.receptacles[1].footprint;
  const auto cfg = ground_truth_config();
  const auto ep = testing::make_episode(testing::kCup, testing::kCounter, testing::kTable, {5.75, 2.0, kPi / 2.0});
  harness::SimEnv env(cfg, ep, scene, 5);
  env.begin_phase(Phase::NavToRec);
  NavSkill nav(testing::kTable, NavSkill::TargetKind::Receptacle);
  nav.begin();
  int steps = 0;
  while (steps < 400 && rec.distance_to(env.agent_state().base.position()) > 1.0) {
    env.step(nav.act(env.observe()));
    ++steps;
  }
  EXPECT_LE(rec.distance_to(env.agent_state().base.position()), 1.0) << "after " << steps << " steps";
}

// Forwards actions to the simulator and remembers where the gripper was when
// the object was let go.
class ReleaseSpy : public Env {
 public:
  ReleaseSpy(harness::SimEnv& env, const world::WorldConfig& cfg) : env_(env), cfg_(cfg) {}
  Observation observe() override { return env_.observe(); }
  void step(const world::Action& a) override {
    if (std::holds_alternative<world::action::Snap>(a)) snapped = true;
    if (std::holds_alternative<world::action::Release>(a)) release_at = world::gripper_xy(env_.agent_state(), cfg_);
    env_.step(a);
  }
  bool snapped = false;
  std::optional<Vec2> release_at;

 private:
  harness::SimEnv& env_;
  const world::WorldConfig& cfg_;
};

TEST(ScriptedSkills, GazeSnapsCloseObjectThenPlaceReleasesOverTable) {
  auto scene = testing::empty_room(5.0, 4.0);
  const auto& table = testing::add_receptacle(scene, testing::kTable, {1.3, 1.6, 2.1, 2.4}, 0.5);
  const Rect footprint = table.footprint;
  testing::add_object_on(scene, testing::kCup, table.id, 1.5, 2.0, 0.08);
  const auto cfg = ground_truth_config();
  const auto ep = testing::make_episode(testing::kCup, testing::kTable, testing::kTable, {1.0, 2.0, 0.0});
  harness::SimEnv env(cfg, ep, scene, 9);
  ReleaseSpy spy(env, cfg.world);

  env.begin_phase(Phase::Gaze);
  GazeSkill gaze(testing::kCup);
  const auto gazed = run_skill(gaze, spy, 80);
  EXPECT_EQ(gazed.status, Status::Stopped);
  EXPECT_TRUE(spy.snapped);
  EXPECT_TRUE(env.holding());

  env.begin_phase(Phase::Place);
  PlaceSkill place(testing::kTable);
  const auto placed = run_skill(place, spy, 200);
  EXPECT_EQ(placed.status, Status::Stopped);
  ASSERT_TRUE(spy.release_at.has_value());
  EXPECT_TRUE(footprint.contains(*spy.release_at));
  ASSERT_TRUE(env.trace().placement.has_value());
  EXPECT_LE(env.trace().placement->drop_height, 0.1);
  EXPECT_TRUE(env.check_phase(Phase::Place));
}

}  // namespace
}  // namespace ovmm
