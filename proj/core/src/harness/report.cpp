#include "ovmm/harness/report.hpp"

#include <array>
#include <cmath>
#include <cstdio>

namespace ovmm::harness {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// Half-way cases round away from zero, so 6.25 prints as 6.3 rather than
// printf's round-half-even 6.2.
double tenths(double v) { return std::round(v * 10.0) / 10.0; }

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string padr(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string delta(double v, double base) {
  // Round first so a tiny negative difference does not print as "-0.0".
  const double d = std::round((v - base) * 10.0) / 10.0;
  return fmt(d >= 0.0 ? "(+%.1f)" : "(%.1f)", d == 0.0 ? 0.0 : d);
}

constexpr std::size_t kLabel = 28;
constexpr std::size_t kCell = 16;

const std::array<const char*, 5> kAbsoluteHeader = {"NavToObj", "Pick", "NavToRec", "Overall SR", "PSM"};
const std::array<const char*, 4> kRelativeHeader = {"NavToObj", "Pick", "NavToRec", "Place"};

std::array<double, 5> absolute_row(const task::MetricsReport& m) {
  return {m.nav_to_obj, m.pick, m.nav_to_rec, m.overall_success_rate, m.partial_success_metric};
}

template <std::size_t N>
std::string header(const std::string& title, const std::array<const char*, N>& cols) {
  std::string s = padr(title, kLabel);
  for (const char* c : cols) s += pad(c, kCell);
  return s + '\n';
}

template <std::size_t N>
std::string row(const std::string& label, const std::array<double, N>& v, const std::array<double, N>* base) {
  std::string s = padr(label, kLabel);
  for (std::size_t i = 0; i < N; ++i) {
    std::string cell = fmt("%.1f", tenths(v[i]));
    if (base != nullptr) cell += " " + delta(v[i], (*base)[i]);
    s += pad(cell, kCell);
  }
  return s + '\n';
}

}  // namespace

task::MetricsReport metrics_of(const std::vector<EpisodeResult>& results) {
  std::vector<task::SuccessFlags> flags;
  flags.reserve(results.size());
  for (const auto& r : results) flags.push_back(r.flags);
  return task::aggregate_metrics(flags);
}

std::vector<task::CauseShare> place_failure_histogram(const std::vector<EpisodeResult>& results) {
  std::vector<task::FailureCause> causes;
  for (const auto& r : results) {
    const auto f = r.flags.gated();
    if (f.pick && !f.place) causes.push_back(r.failure_cause);
  }
  return task::failure_histogram(causes);
}

std::string render_failure_histogram(const std::vector<task::CauseShare>& shares) {
  std::string s;
  for (const auto& c : shares) {
    s += "  " + std::string(task::failure_cause_name(c.cause)) + " - " + fmt("%.1f%%", tenths(c.percent)) + '\n';
  }
  return s;
}

std::string render_report(const LabeledResults& run) {
  const task::MetricsReport m = metrics_of(run.results);
  std::string s = run.label + " (" + std::to_string(m.n_episodes) + " episodes)\n";
  s += header("absolute success (%)", kAbsoluteHeader);
  s += row<5>("", absolute_row(m), nullptr);
  s += header("relative success (%)", kRelativeHeader);
  s += row<4>("", m.relative, nullptr);
  const auto hist = place_failure_histogram(run.results);
  int failures = 0;
  for (const auto& c : hist) failures += c.count;
  s += "place failure causes (" + std::to_string(failures) + " episodes)\n";
  s += hist.empty() ? "  none\n" : render_failure_histogram(hist);
  return s;
}

std::string render_comparison(const std::vector<LabeledResults>& runs) {
  if (runs.empty()) return {};
  std::vector<task::MetricsReport> ms;
  for (const auto& r : runs) ms.push_back(metrics_of(r.results));
  const auto base_abs = absolute_row(ms.front());
  const auto base_rel = ms.front().relative;

  std::string s = header("absolute success (%)", kAbsoluteHeader);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    s += row<5>(runs[i].label, absolute_row(ms[i]), i == 0 ? nullptr : &base_abs);
  }
  s += '\n' + header("relative success (%)", kRelativeHeader);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    s += row<4>(runs[i].label, ms[i].relative, i == 0 ? nullptr : &base_rel);
  }
  return s;
}

}  // namespace ovmm::harness
