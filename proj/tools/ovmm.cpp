// Command-line front end: dataset generation, batch runs, reports and
// offline label-map fusion.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ovmm/harness/batch.hpp"
#include "ovmm/harness/config.hpp"
#include "ovmm/harness/dataset.hpp"
#include "ovmm/harness/pgm.hpp"
#include "ovmm/harness/report.hpp"
#include "ovmm/harness/results.hpp"

namespace {

using namespace ovmm;
using namespace ovmm::harness;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kIoError = 2;

int cmd_gen(int n, std::uint64_t seed, const std::string& spec_file, const std::string& out) {
  world::SceneSpec spec = world::default_scene_spec();
  if (!spec_file.empty()) spec = scene_spec_from(ConfigDocument::load(spec_file));
  const Dataset ds = generate_dataset(n, seed, spec);
  write_dataset(ds, out);
  std::cout << "wrote " << ds.episodes.size() << " episodes to " << out << '\n';
  return kOk;
}

int cmd_run(const std::string& dataset, const std::string& config, std::uint64_t seed, int workers,
            const std::string& out, bool trace) {
  RunConfig cfg;
  if (!config.empty()) cfg = run_config_from(ConfigDocument::load(config));
  cfg.dataset_path = dataset;
  cfg.master_seed = seed;
  cfg.workers = workers;
  cfg.output_dir = out;
  cfg.trace = trace;
  validate(cfg);
  const BatchSummary summary = run_batch(cfg);
  int crashed = 0;
  for (const auto& r : summary.results) crashed += r.error.has_value();
  if (summary.results.empty()) {
    std::cout << "no episodes\n";
    return kOk;
  }
  std::cout << render_report({perception_mode_name(cfg.perception), summary.results});
  if (crashed > 0) std::cout << crashed << " episode(s) raised errors; see " << out << "/" << kResultsFile << '\n';
  return kOk;
}

int cmd_report(const std::vector<std::string>& files, bool compare) {
  std::vector<LabeledResults> runs;
  for (const auto& f : files) {
    auto results = read_results(f);
    if (results.empty()) throw IoError(f + " has no records");
    runs.push_back({f, std::move(results)});
  }
  if (compare) {
    std::cout << render_comparison(runs);
    return kOk;
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i > 0) std::cout << '\n';
    std::cout << render_report(runs[i]);
  }
  return kOk;
}

int cmd_fuse(const std::string& taskspec_img, const std::string& openvocab_img, int goal, int start_rec,
             int goal_rec, const std::string& out) {
  const GrayImage ts = read_pgm(taskspec_img);
  const GrayImage ov = read_pgm(openvocab_img);
  auto class_arg = [](int v, const char* name) {
    if (v < 0 || v > 255) throw ConfigError(std::string(name) + " must be in [0, 255]");
    return ClassId{static_cast<std::uint8_t>(v)};
  };
  const perception::TaskClasses task{class_arg(goal, "--goal-class"), class_arg(start_rec, "--start-receptacle"),
                                     class_arg(goal_rec, "--goal-receptacle")};
  perception::LabelMap fused;
  try {
    fused = perception::fuse(label_map_from_image(ts, perception::Provenance::TaskSpec),
                             detections_from_image(ov, perception::Provenance::OpenVocab), task);
  } catch (const perception::DimensionMismatch& e) {
    throw ConfigError(e.what());
  }
  write_pgm(image_from_label_map(fused), out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-vocabulary mobile manipulation simulator and evaluation harness"};
  app.require_subcommand(1);

  int gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate an episode dataset");
  gen->add_option("--n", gen_n, "Number of episodes")->required();
  gen->add_option("--seed", gen_seed, "Dataset seed")->required();
  gen->add_option("--spec", gen_spec, "Config file whose [scene] section sets the scene spec");
  gen->add_option("--out", gen_out, "Output dataset file")->required();

  std::string run_dataset;
  std::string run_config;
  std::uint64_t run_seed = 0;
  int run_workers = 1;
  std::string run_out;
  bool run_trace = false;
  auto* run = app.add_subcommand("run", "Run every episode of a dataset");
  run->add_option("--dataset", run_dataset, "Dataset file")->required();
  run->add_option("--config", run_config, "Run config file");
  run->add_option("--seed", run_seed, "Master seed")->required();
  run->add_option("--workers", run_workers, "Worker threads");
  run->add_option("--out", run_out, "Output directory")->required();
  run->add_flag("--trace", run_trace, "Also write per-step traces");

  std::vector<std::string> report_files;
  bool report_compare = false;
  auto* report = app.add_subcommand("report", "Render metrics tables from results files");
  report->add_option("results", report_files, "Results files")->required();
  report->add_flag("--compare", report_compare, "Side-by-side table with deltas against the first file");

  std::string fuse_ts;
  std::string fuse_ov;
  std::string fuse_out;
  int fuse_goal = 0;
  int fuse_start = 0;
  int fuse_goal_rec = 0;
  auto* fuse = app.add_subcommand("fuse", "Fuse two label images (8-bit PGM, pixel = class id)");
  fuse->add_option("--taskspec", fuse_ts, "Task-specific label image")->required();
  fuse->add_option("--openvocab", fuse_ov, "Open-vocabulary label image")->required();
  fuse->add_option("--goal-class", fuse_goal, "Goal object class id")->required();
  fuse->add_option("--start-receptacle", fuse_start, "Start receptacle class id (0 = none)");
  fuse->add_option("--goal-receptacle", fuse_goal_rec, "Goal receptacle class id (0 = none)");
  fuse->add_option("--out", fuse_out, "Output label image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) return cmd_gen(gen_n, gen_seed, gen_spec, gen_out);
    if (*run) return cmd_run(run_dataset, run_config, run_seed, run_workers, run_out, run_trace);
    if (*report) return cmd_report(report_files, report_compare);
    if (*fuse) return cmd_fuse(fuse_ts, fuse_ov, fuse_goal, fuse_start, fuse_goal_rec, fuse_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
