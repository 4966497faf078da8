#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aamcm/env_config.hpp"
#include "aamcm/geo.hpp"
#include "aamcm/rng.hpp"

namespace aamcm::metrics {

/// Global flight ids are day * kDayStride + per-day id.
inline constexpr std::int64_t kDayStride = 100000;
inline constexpr int kDefaultResamples = 1000;

struct FlightRecord {
  std::int64_t flight_id = 0;
  std::string agent;
  TerminalState terminal = TerminalState::Active;
  double total_reward = 0.0;
  double flight_time_s = 0.0;
  int actions = 0;  // contingency (heading-change) actions taken
  double pc_terminal = 0.0;
  std::vector<geo::GeoPoint> track;

  int day() const noexcept { return static_cast<int>(flight_id / kDayStride); }
  /// Equality over the exported columns only.
  bool same_columns(const FlightRecord& o) const noexcept {
    return flight_id == o.flight_id && agent == o.agent && terminal == o.terminal &&
           total_reward == o.total_reward && flight_time_s == o.flight_time_s && actions == o.actions &&
           pc_terminal == o.pc_terminal;
  }
};

using ClassFractions = std::array<double, kOutcomeClasses.size()>;

struct Interval {
  double mean = 0.0;
  double halfwidth = 0.0;
};

/// Mean of `values` and twice the standard deviation of B resampled means.
Interval bootstrap_ci(std::span<const double> values, Rng& rng, int resamples = kDefaultResamples);

struct EvaluationSummary {
  std::string agent;
  std::size_t flights = 0;    // terminated flights counted in fractions
  std::size_t timed_out = 0;  // excluded from fractions
  std::vector<int> days;
  std::vector<ClassFractions> day_fractions;
  ClassFractions mean{};
  /// Absent when fewer than two days were evaluated.
  std::optional<ClassFractions> ci_halfwidth;
  Interval vertiports_reached;
  bool vertiports_ci = false;
};

std::size_t class_index(TerminalState t);

/// Per-day fractions over the six outcome classes and their cross-day mean.
/// Days without any counted flight are dropped.
EvaluationSummary summarize(std::span<const FlightRecord> records, std::uint64_t seed = 0,
                            int resamples = kDefaultResamples);
/// One summary per agent label, in label order.
std::map<std::string, EvaluationSummary> summarize_by_agent(std::span<const FlightRecord> records,
                                                            std::uint64_t seed = 0);

inline constexpr const char* kCsvHeader = "flight_id,agent,terminal,total_reward,flight_time_s,actions,pc_terminal";

void write_csv(std::span<const FlightRecord> records, std::ostream& out);
std::vector<FlightRecord> read_csv(std::istream& in);
void write_jsonl(std::span<const FlightRecord> records, std::ostream& out);
std::vector<FlightRecord> read_jsonl(std::istream& in);
std::string summary_json(const std::map<std::string, EvaluationSummary>& summaries);

void save_csv(std::span<const FlightRecord> records, const std::filesystem::path& path);
void save_jsonl(std::span<const FlightRecord> records, const std::filesystem::path& path);
void save_text(const std::string& text, const std::filesystem::path& path);

}  // namespace aamcm::metrics
