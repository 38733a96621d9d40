#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ovmm/harness/batch.hpp"
#include "ovmm/harness/config.hpp"
#include "ovmm/harness/dataset.hpp"
#include "ovmm/harness/pgm.hpp"
#include "ovmm/harness/report.hpp"
#include "ovmm/harness/results.hpp"
#include "support/fixtures.hpp"

namespace ovmm {
namespace {

using namespace ovmm::harness;
namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ovmm_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Config, ParsesSectionsAndOverridesDefaults) {
  const auto doc = ConfigDocument::parse(
      "# comment\n[perception]\nmode = \"ground_truth\"\n\n[world]\nsnap_failure_prob = 0.3  # noisy\n"
      "[agent]\nretry_loop = false\n[detector.openvocab]\nrecall_20 = 0.5\n");
  const auto cfg = run_config_from(doc);
  EXPECT_EQ(cfg.perception, PerceptionMode::GroundTruth);
  EXPECT_DOUBLE_EQ(cfg.world.snap_failure_prob, 0.3);
  EXPECT_FALSE(cfg.agent.retry_loop);
  EXPECT_DOUBLE_EQ(cfg.openvocab.recall(ClassId{20}), 0.5);
  EXPECT_EQ(RunConfig{}.perception, PerceptionMode::Fused);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(ConfigDocument::parse("[world\n"), ConfigError);
  EXPECT_THROW(ConfigDocument::parse("key\n"), ConfigError);
  EXPECT_THROW(ConfigDocument::parse("[a]\nk = 1\nk = 2\n"), ConfigError);
  EXPECT_THROW(run_config_from(ConfigDocument::parse("[nope]\nx = 1\n")), ConfigError);
  EXPECT_THROW(run_config_from(ConfigDocument::parse("[world]\nbogus = 1\n")), ConfigError);
  EXPECT_THROW(run_config_from(ConfigDocument::parse("[perception]\nmode = \"xray\"\n")), ConfigError);
  EXPECT_THROW(run_config_from(ConfigDocument::parse("[world]\nk_stable = 1.5\n")), ConfigError);
  auto cfg = run_config_from(ConfigDocument::parse("[world]\nsnap_failure_prob = 1.5\n"));
  EXPECT_THROW(validate(cfg), ConfigError);
  EXPECT_THROW(ConfigDocument::load("/nonexistent/ovmm.toml"), IoError);
}

TEST(Dataset, DeterministicAndValid) {
  const auto spec = world::default_scene_spec();
  const auto a = generate_dataset(1000, 42, spec);
  EXPECT_EQ(serialize_dataset(a), serialize_dataset(generate_dataset(1000, 42, spec)));
  ASSERT_EQ(a.episodes.size(), 1000u);
  for (const auto& ep : a.episodes) {
    const auto scene = instantiate_scene(ep, spec);
    bool rests_on_start = false;
    for (const auto& o : scene.objects) {
      if (o.class_id != ep.prompt.goal_object || o.resting_on.kind != world::Support::Kind::Receptacle) continue;
      const auto* r = scene.find_receptacle(o.resting_on.receptacle_id);
      rests_on_start = rests_on_start || (r != nullptr && r->class_id == ep.prompt.start_receptacle);
    }
    ASSERT_TRUE(rests_on_start) << "episode " << ep.id;
    ASSERT_TRUE(scene.has_receptacle_class(ep.prompt.goal_receptacle));
    ASSERT_NE(ep.prompt.goal_receptacle, ep.prompt.start_receptacle);
    ASSERT_TRUE(world::is_free(scene, ep.agent_start.position(), 0.2));
  }
  EXPECT_TRUE(generate_dataset(0, 1, spec).episodes.empty());
}

TEST(Dataset, FileRoundTrip) {
  const auto dir = fresh_dir("dataset");
  const auto ds = generate_dataset(10, 1, world::default_scene_spec());
  write_dataset(ds, dir / "a.jsonl");
  write_dataset(generate_dataset(10, 1, world::default_scene_spec()), dir / "b.jsonl");
  EXPECT_EQ(slurp(dir / "a.jsonl"), slurp(dir / "b.jsonl"));
  EXPECT_EQ(serialize_dataset(read_dataset(dir / "a.jsonl")), serialize_dataset(ds));
  EXPECT_THROW(read_dataset(dir / "missing.jsonl"), IoError);
  EXPECT_THROW(parse_dataset("{\"not\": \"a header\"}\n"), IoError);
}

TEST(Pgm, RoundTripsLabelMaps) {
  const auto dir = fresh_dir("pgm");
  GrayImage img{5, 3, {0, 10, 10, 20, 0, 1, 1, 0, 20, 20, 12, 0, 0, 0, 21}};
  write_pgm(img, dir / "x.pgm");
  const auto back = read_pgm(dir / "x.pgm");
  EXPECT_EQ(back.width, 5);
  EXPECT_EQ(back.height, 3);
  EXPECT_EQ(back.pixels, img.pixels);
  const auto labels = label_map_from_image(back, perception::Provenance::TaskSpec);
  EXPECT_EQ(image_from_label_map(labels).pixels, img.pixels);
  const auto dets = detections_from_image(back, perception::Provenance::OpenVocab);
  EXPECT_EQ(perception::compose_priority(dets, {}).classes, labels.classes);
  std::ofstream(dir / "bad.pgm") << "P7\n1 1\n255\n";
  EXPECT_THROW(read_pgm(dir / "bad.pgm"), IoError);
}

RunConfig config_for(PerceptionMode mode, std::uint64_t seed) {
  RunConfig cfg;
  cfg.perception = mode;
  cfg.master_seed = seed;
  return cfg;
}

TEST(Simulation, GroundTruthEpisodeSucceeds) {
  const auto ds = generate_dataset(1, 2024, world::default_scene_spec());
  const auto r = run_episode(config_for(PerceptionMode::GroundTruth, 11), ds.scene_spec, ds.episodes[0]);
  EXPECT_FALSE(r.error.has_value());
  EXPECT_EQ(r.flags, (task::SuccessFlags{true, true, true, true}));
  EXPECT_EQ(r.failure_cause, task::FailureCause::NotFailed);
  EXPECT_GT(r.shaped_reward, 0.0);
}

TEST(Simulation, EpisodeErrorsAreContained) {
  const auto ds = generate_dataset(1, 2024, world::default_scene_spec());
  auto cfg = config_for(PerceptionMode::GroundTruth, 11);
  cfg.skills = SkillMode::Replay;
  ReplayPlan plan;
  plan[task::Phase::NavToObj] = {{world::action::Release{}}};
  const auto r = run_episode(cfg, ds.scene_spec, ds.episodes[0], &plan);
  ASSERT_TRUE(r.error.has_value());
  EXPECT_NE(r.error->find("empty gripper"), std::string::npos);
  EXPECT_EQ(r.flags, task::SuccessFlags{});
}

TEST(Results, LinesRoundTrip) {
  const auto ds = generate_dataset(2, 2024, world::default_scene_spec());
  const auto r = run_episode(config_for(PerceptionMode::Fused, 3), ds.scene_spec, ds.episodes[1], nullptr, true);
  const auto back = parse_result_line(result_line(r));
  EXPECT_EQ(back.episode_id, r.episode_id);
  EXPECT_EQ(back.flags, r.flags);
  EXPECT_EQ(back.failure_cause, r.failure_cause);
  EXPECT_EQ(back.steps, r.steps);
  EXPECT_EQ(result_line(back), result_line(r));
  ASSERT_TRUE(r.trace.has_value());
  const auto trace = parse_trace_line(trace_line(r.episode_id, *r.trace));
  EXPECT_EQ(trace_line(r.episode_id, trace), trace_line(r.episode_id, *r.trace));
  EXPECT_THROW(parse_result_line("{broken"), IoError);
}

class BatchFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fresh_dir("batch"));
    write_dataset(generate_dataset(12, 5, world::default_scene_spec()), *dir_ / "ds.jsonl");
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static BatchSummary run(const std::string& out, int workers, bool trace = false,
                          const fs::path& replay = {}) {
    RunConfig cfg = config_for(PerceptionMode::Fused, 17);
    cfg.dataset_path = *dir_ / "ds.jsonl";
    cfg.workers = workers;
    cfg.output_dir = *dir_ / out;
    cfg.trace = trace;
    if (!replay.empty()) {
      cfg.skills = SkillMode::Replay;
      cfg.replay_file = replay;
    }
    return run_batch(cfg);
  }

  static fs::path* dir_;
};

fs::path* BatchFixture::dir_ = nullptr;

TEST_F(BatchFixture, WorkerCountDoesNotChangeResults) {
  run("w1", 1);
  run("w8", 8);
  const auto a = slurp(*dir_ / "w1" / kResultsFile);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(*dir_ / "w8" / kResultsFile));
}

TEST_F(BatchFixture, ReplayReproducesRecordedEpisodes) {
  const auto live = run("live", 2, true);
  const auto replayed = run("replay", 2, false, *dir_ / "live" / kTracesFile);
  ASSERT_EQ(live.results.size(), replayed.results.size());
  for (std::size_t i = 0; i < live.results.size(); ++i) {
    EXPECT_EQ(live.results[i].flags, replayed.results[i].flags) << "episode " << i;
    EXPECT_EQ(live.results[i].steps, replayed.results[i].steps) << "episode " << i;
  }
}

TEST_F(BatchFixture, ReportAgreesWithBatchMetrics) {
  const auto summary = run("report", 1);
  const auto read = read_results(*dir_ / "report" / kResultsFile);
  ASSERT_EQ(read.size(), summary.results.size());
  const auto m = metrics_of(read);
  EXPECT_DOUBLE_EQ(m.partial_success_metric, summary.metrics.partial_success_metric);
  EXPECT_DOUBLE_EQ(m.overall_success_rate, summary.metrics.overall_success_rate);
}

EpisodeResult result_with(task::SuccessFlags f, task::FailureCause c = task::FailureCause::NotFailed) {
  EpisodeResult r;
  r.flags = f;
  r.failure_cause = c;
  return r;
}

TEST(Report, ShowsPartialSuccessAndHistogram) {
  std::vector<EpisodeResult> rs;
  rs.push_back(result_with({true, true, true, true}));
  rs.push_back(result_with({true, true, true, false}, task::FailureCause::UnstablePlace));
  rs.push_back(result_with({true, true, false, false}, task::FailureCause::DidNotStartPlace));
  rs.push_back(result_with({true, true, true, false}, task::FailureCause::UnstablePlace));
  rs.push_back(result_with({false, false, false, false}, task::FailureCause::DidNotStartPlace));
  const auto text = render_report({"demo", rs});
  // PSM = (80 + 80 + 60 + 20) / 4.
  EXPECT_NE(text.find("60.0"), std::string::npos);
  EXPECT_NE(text.find("  unstable place - 66.7%\n  did not start place skill - 33.3%"), std::string::npos) << text;
  const auto hist = place_failure_histogram(rs);
  ASSERT_EQ(hist.size(), 2u);
  EXPECT_EQ(hist[0].cause, task::FailureCause::UnstablePlace);
}

TEST(Report, ComparingARunWithItselfGivesZeroDeltas) {
  std::vector<EpisodeResult> rs{result_with({true, true, false, false}), result_with({true, true, true, true})};
  const auto text = render_comparison({{"a", rs}, {"b", rs}});
  EXPECT_NE(text.find("(+0.0)"), std::string::npos);
  EXPECT_EQ(text.find("(-"), std::string::npos);
}

}  // namespace
}  // namespace ovmm
