#include "ovmm/harness/batch.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "ovmm/harness/results.hpp"

namespace ovmm::harness {

namespace {

/// Holds finished results until every earlier episode is done, then appends
/// them to the output files in dataset order.
class OrderedWriter {
 public:
  OrderedWriter(std::size_t n, const std::filesystem::path& dir, bool trace) : pending_(n) {
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    results_.open(dir / kResultsFile, std::ios::binary | std::ios::trunc);
    timing_.open(dir / kTimingFile, std::ios::binary | std::ios::trunc);
    if (!results_ || !timing_) throw IoError("cannot open output files in " + dir.string());
    if (trace) {
      traces_.open(dir / kTracesFile, std::ios::binary | std::ios::trunc);
      if (!traces_) throw IoError("cannot open trace file in " + dir.string());
    }
    enabled_ = true;
  }

  void put(std::size_t index, EpisodeResult r) {
    std::lock_guard lock(mu_);
    pending_[index] = std::move(r);
    while (next_ < pending_.size() && pending_[next_]) {
      EpisodeResult& done = *pending_[next_];
      if (enabled_) {
        results_ << result_line(done) << '\n';
        timing_ << timing_line(done) << '\n';
        if (traces_.is_open() && done.trace) traces_ << trace_line(done.episode_id, *done.trace) << '\n';
        results_.flush();
      }
      done.trace.reset();
      finished_.push_back(std::move(done));
      ++next_;
    }
  }

  std::vector<EpisodeResult> finish() {
    if (enabled_) {
      results_.flush();
      timing_.flush();
      if (traces_.is_open()) traces_.flush();
      if (!results_ || !timing_ || (traces_.is_open() && !traces_)) throw IoError("writing results failed");
    }
    return std::move(finished_);
  }

 private:
  std::mutex mu_;
  std::vector<std::optional<EpisodeResult>> pending_;
  std::vector<EpisodeResult> finished_;
  std::size_t next_ = 0;
  bool enabled_ = false;
  std::ofstream results_;
  std::ofstream timing_;
  std::ofstream traces_;
};

}  // namespace

BatchSummary run_batch(const RunConfig& cfg, const Dataset& dataset) {
  validate(cfg);
  std::map<int, ReplayPlan> plans;
  if (cfg.skills == SkillMode::Replay) {
    for (const auto& [id, trace] : read_traces(cfg.replay_file)) plans[id] = replay_plan(trace);
    for (const auto& ep : dataset.episodes) {
      if (plans.count(ep.id) == 0) {
        throw ConfigError("replay file has no trace for episode " + std::to_string(ep.id));
      }
    }
  }

  const std::size_t n = dataset.episodes.size();
  OrderedWriter writer(n, cfg.output_dir, cfg.trace);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      const auto& ep = dataset.episodes[i];
      const ReplayPlan* plan = nullptr;
      if (auto it = plans.find(ep.id); it != plans.end()) plan = &it->second;
      writer.put(i, run_episode(cfg, dataset.scene_spec, ep, plan, cfg.trace));
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(std::max<std::size_t>(n, 1))));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  BatchSummary out;
  out.results = writer.finish();
  if (!out.results.empty()) {
    std::vector<task::SuccessFlags> flags;
    flags.reserve(out.results.size());
    for (const auto& r : out.results) flags.push_back(r.flags);
    out.metrics = task::aggregate_metrics(flags);
  }
  return out;
}

BatchSummary run_batch(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.dataset_path.empty()) throw ConfigError("no dataset given");
  return run_batch(cfg, read_dataset(cfg.dataset_path));
}

}  // namespace ovmm::harness
