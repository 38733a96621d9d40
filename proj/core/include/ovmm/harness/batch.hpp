#pragma once

#include <filesystem>
#include <vector>

#include "ovmm/harness/dataset.hpp"
#include "ovmm/harness/simulation.hpp"

namespace ovmm::harness {

inline constexpr const char* kResultsFile = "results.jsonl";
inline constexpr const char* kTimingFile = "timing.jsonl";
inline constexpr const char* kTracesFile = "traces.jsonl";

struct BatchSummary {
  std::vector<EpisodeResult> results;
  task::MetricsReport metrics;
};

/// Runs every episode on a fixed pool of cfg.workers threads that pull the
/// next unclaimed episode. Records are written in dataset order as soon as
/// their predecessors are done. Writes nothing when cfg.output_dir is empty.
BatchSummary run_batch(const RunConfig& cfg, const Dataset& dataset);

/// Loads the dataset named in the config and runs it.
BatchSummary run_batch(const RunConfig& cfg);

}  // namespace ovmm::harness
