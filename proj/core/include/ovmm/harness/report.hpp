#pragma once

#include <string>
#include <vector>

#include "ovmm/harness/simulation.hpp"

namespace ovmm::harness {

struct LabeledResults {
  std::string label;
  std::vector<EpisodeResult> results;
};

task::MetricsReport metrics_of(const std::vector<EpisodeResult>& results);

/// Causes of the episodes that picked the object but did not place it.
std::vector<task::CauseShare> place_failure_histogram(const std::vector<EpisodeResult>& results);

/// "unstable place - 25.0%" lines, largest share first.
std::string render_failure_histogram(const std::vector<task::CauseShare>& shares);

/// Absolute rates, overall success and partial success metric, then the
/// relative rates, then the failure histogram.
std::string render_report(const LabeledResults& run);

/// One row per run; every run after the first carries deltas against the
/// first in "(+x.x)" form.
std::string render_comparison(const std::vector<LabeledResults>& runs);

}  // namespace ovmm::harness
