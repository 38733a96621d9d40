#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "ovmm/task/episode.hpp"
#include "ovmm/world/render.hpp"

namespace ovmm::task {

inline constexpr double kNavSuccessRadius = 1.0;

/// Close to some goal-object instance (closed threshold) and that same
/// instance visible in the ground-truth frame.
bool check_nav_to_obj(const world::AgentState& agent, const world::Scene& scene, const Episode& ep,
                      const world::Frame& frame, double radius = kNavSuccessRadius);

/// The gripper holds an instance of the goal-object class.
bool check_pick(const world::AgentState& agent, const world::Scene& scene, const Episode& ep);

/// Base within radius of the nearest goal-receptacle footprint.
bool check_nav_to_rec(const world::AgentState& agent, const world::Scene& scene, const Episode& ep,
                      double radius = kNavSuccessRadius);

/// Landed on any goal-receptacle instance and settled stably.
bool check_place(const world::PlacementOutcome& outcome, const world::Scene& scene, const Episode& ep);

PlacementSummary summarize_placement(const world::PlacementOutcome& outcome,
                                     const world::Scene& scene, const Episode& ep);

/// Flags from the last completion of each subtask's skill, then gated.
SuccessFlags episode_flags(const EpisodeTrace& trace);

struct MetricsReport {
  int n_episodes = 0;
  double nav_to_obj = 0.0;
  double pick = 0.0;
  double nav_to_rec = 0.0;
  double overall_success_rate = 0.0;
  /// Mean of the four subtask rates.
  double partial_success_metric = 0.0;
  /// Subtask success conditioned on the previous subtask succeeding.
  std::array<double, 4> relative{};

  std::array<double, 4> absolute() const { return {nav_to_obj, pick, nav_to_rec, overall_success_rate}; }
};

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

MetricsReport aggregate_metrics(std::span<const SuccessFlags> flags);

/// Relative rates from absolute percents; a zero predecessor yields 0.
std::array<double, 4> relative_rates(const std::array<double, 4>& absolute);
std::array<double, 4> relative_rates(const MetricsReport& report);

enum class FailureCause : std::uint8_t {
  UnstablePlace,
  MissedReceptacle,
  CameraOverlap,
  DidNotStartPlace,
  Uncertain,
  NotFailed,
};

std::string_view failure_cause_name(FailureCause c);
/// Inverse of failure_cause_name; throws std::invalid_argument.
FailureCause parse_failure_cause(std::string_view name);

/// Blocked-fraction level above which a place-phase frame counts as covered
/// by the arm, and the share of such frames that signals camera overlap.
inline constexpr double kOverlapBlockedFraction = 0.2;
inline constexpr double kOverlapFrameShare = 0.5;

FailureCause classify_place_failure(const EpisodeTrace& trace);

struct CauseShare {
  FailureCause cause;
  int count = 0;
  double percent = 0.0;
};

/// Percentages over all non-NotFailed causes, largest first (ties in enum
/// order). Uncertain is a catch-all and always comes last.
std::vector<CauseShare> failure_histogram(std::span<const FailureCause> causes);

}  // namespace ovmm::task
