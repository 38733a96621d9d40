#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ovmm/harness/simulation.hpp"

namespace ovmm::harness {

/// One JSON object per line. Wall time and the trace are written to their own
/// files so the results file is a pure function of the inputs.
std::string result_line(const EpisodeResult& r);
std::string timing_line(const EpisodeResult& r);
std::string trace_line(int episode_id, const task::EpisodeTrace& trace);

EpisodeResult parse_result_line(const std::string& line);
task::EpisodeTrace parse_trace_line(const std::string& line);

std::vector<EpisodeResult> read_results(const std::filesystem::path& path);
/// Episode id to recorded trace.
std::map<int, task::EpisodeTrace> read_traces(const std::filesystem::path& path);

}  // namespace ovmm::harness
