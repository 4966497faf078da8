#include "aamcm/metrics.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "aamcm/error.hpp"
#include "aamcm/text.hpp"

namespace aamcm::metrics {

using nlohmann::ordered_json;

Interval bootstrap_ci(std::span<const double> values, Rng& rng, int resamples) {
  if (values.empty()) throw Error(Errc::EmptyEvaluation, "no values to resample");
  if (values.size() < 2) throw Error(Errc::InsufficientData, "bootstrap needs at least two days");
  if (resamples < 2) throw Error(Errc::InsufficientData, "bootstrap needs at least two resamples");
  const double n = static_cast<double>(values.size());
  Interval out;
  for (double v : values) out.mean += v;
  out.mean /= n;

  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[rng.uniform_index(values.size())];
    m = s / n;
  }
  // Shifted by the first mean so identical resamples give exactly zero.
  const double k = means.front();
  double mu = 0.0;
  for (double m : means) mu += m - k;
  mu /= resamples;
  double ss = 0.0;
  for (double m : means) ss += (m - k - mu) * (m - k - mu);
  out.halfwidth = 2.0 * std::sqrt(ss / (resamples - 1));
  return out;
}

std::size_t class_index(TerminalState t) {
  for (std::size_t i = 0; i < kOutcomeClasses.size(); ++i) {
    if (kOutcomeClasses[i] == t) return i;
  }
  throw Error(Errc::InvalidTerminal, "not an outcome class: " + std::string(terminal_name(t)));
}

EvaluationSummary summarize(std::span<const FlightRecord> records, std::uint64_t seed, int resamples) {
  if (records.empty()) throw Error(Errc::EmptyEvaluation, "no flight records");
  EvaluationSummary s;
  s.agent = records.front().agent;
  std::map<int, std::array<std::size_t, kOutcomeClasses.size()>> counts;
  for (const auto& r : records) {
    if (r.terminal == TerminalState::TimedOut) {
      ++s.timed_out;
      continue;
    }
    if (r.terminal == TerminalState::Active) throw Error(Errc::InvalidTerminal, "record without terminal");
    ++counts[r.day()][class_index(r.terminal)];
    ++s.flights;
  }
  if (counts.empty()) throw Error(Errc::EmptyEvaluation, "no terminated flights");

  std::vector<double> reached;
  for (const auto& [day, c] : counts) {
    std::size_t total = 0;
    for (auto k : c) total += k;
    ClassFractions f{};
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(c[i]) / static_cast<double>(total);
    s.days.push_back(day);
    s.day_fractions.push_back(f);
    reached.push_back(f[0] + f[1] + f[2]);
  }
  const double n = static_cast<double>(s.days.size());
  for (const auto& f : s.day_fractions) {
    for (std::size_t i = 0; i < f.size(); ++i) s.mean[i] += f[i] / n;
  }
  s.vertiports_reached.mean = 0.0;
  for (double r : reached) s.vertiports_reached.mean += r / n;

  if (s.days.size() >= 2) {
    ClassFractions hw{};
    for (std::size_t i = 0; i < hw.size(); ++i) {
      std::vector<double> col;
      for (const auto& f : s.day_fractions) col.push_back(f[i]);
      Rng rng = Rng::derive(seed, 0xB007 + i);
      hw[i] = bootstrap_ci(col, rng, resamples).halfwidth;
    }
    s.ci_halfwidth = hw;
    Rng rng = Rng::derive(seed, 0xB007 + 100);
    s.vertiports_reached = bootstrap_ci(reached, rng, resamples);
    s.vertiports_ci = true;
  }
  return s;
}

std::map<std::string, EvaluationSummary> summarize_by_agent(std::span<const FlightRecord> records,
                                                            std::uint64_t seed) {
  if (records.empty()) throw Error(Errc::EmptyEvaluation, "no flight records");
  std::map<std::string, std::vector<FlightRecord>> groups;
  for (const auto& r : records) groups[r.agent].push_back(r);
  std::map<std::string, EvaluationSummary> out;
  for (const auto& [agent, rs] : groups) out.emplace(agent, summarize(rs, seed));
  return out;
}

void write_csv(std::span<const FlightRecord> records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.flight_id << ',' << r.agent << ',' << terminal_name(r.terminal) << ','
        << text::format_double(r.total_reward) << ',' << text::format_double(r.flight_time_s) << ','
        << r.actions << ',' << text::format_double(r.pc_terminal) << '\n';
  }
}

namespace {

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<FlightRecord> read_csv(std::istream& in) {
  std::vector<FlightRecord> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (line == 1) {
      if (text::trim(raw) != kCsvHeader) bad_line(line, "unexpected header");
      continue;
    }
    if (text::trim(raw).empty()) continue;
    const auto f = text::split(raw, ',');
    if (f.size() != 7) bad_line(line, "expected 7 fields");
    FlightRecord r;
    const auto id = text::parse_int(f[0]);
    const auto term = terminal_from_name(f[2]);
    const auto reward = text::parse_double(f[3]);
    const auto time = text::parse_double(f[4]);
    const auto actions = text::parse_int(f[5]);
    const auto pc = text::parse_double(f[6]);
    if (!id || !term || !reward || !time || !actions || !pc) bad_line(line, "malformed field");
    r.flight_id = *id;
    r.agent = std::string(f[1]);
    r.terminal = *term;
    r.total_reward = *reward;
    r.flight_time_s = *time;
    r.actions = static_cast<int>(*actions);
    r.pc_terminal = *pc;
    out.push_back(std::move(r));
  }
  return out;
}

void write_jsonl(std::span<const FlightRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    ordered_json j;
    j["flight_id"] = r.flight_id;
    j["agent"] = r.agent;
    j["terminal"] = terminal_name(r.terminal);
    j["total_reward"] = r.total_reward;
    j["flight_time_s"] = r.flight_time_s;
    j["actions"] = r.actions;
    j["pc_terminal"] = r.pc_terminal;
    out << j.dump() << '\n';
  }
}

std::vector<FlightRecord> read_jsonl(std::istream& in) {
  std::vector<FlightRecord> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (text::trim(raw).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(raw);
      FlightRecord r;
      r.flight_id = j.at("flight_id").get<std::int64_t>();
      r.agent = j.at("agent").get<std::string>();
      const auto term = terminal_from_name(j.at("terminal").get<std::string>());
      if (!term) bad_line(line, "unknown terminal");
      r.terminal = *term;
      r.total_reward = j.at("total_reward").get<double>();
      r.flight_time_s = j.at("flight_time_s").get<double>();
      r.actions = j.at("actions").get<int>();
      r.pc_terminal = j.at("pc_terminal").get<double>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      bad_line(line, e.what());
    }
  }
  return out;
}

std::string summary_json(const std::map<std::string, EvaluationSummary>& summaries) {
  ordered_json root = ordered_json::object();
  for (const auto& [agent, s] : summaries) {
    ordered_json a;
    a["days"] = s.days.size();
    a["flights"] = s.flights;
    a["timed_out"] = s.timed_out;
    ordered_json classes = ordered_json::object();
    for (std::size_t i = 0; i < kOutcomeClasses.size(); ++i) {
      ordered_json c;
      c["mean"] = s.mean[i];
      c["ci_halfwidth"] = s.ci_halfwidth ? ordered_json((*s.ci_halfwidth)[i]) : ordered_json(nullptr);
      classes[std::string(terminal_name(kOutcomeClasses[i]))] = c;
    }
    a["classes"] = classes;
    a["vertiports_reached"] = {
        {"mean", s.vertiports_reached.mean},
        {"ci_halfwidth", s.vertiports_ci ? ordered_json(s.vertiports_reached.halfwidth) : ordered_json(nullptr)}};
    ordered_json per_day = ordered_json::array();
    for (std::size_t d = 0; d < s.days.size(); ++d) {
      ordered_json row;
      row["day"] = s.days[d];
      for (std::size_t i = 0; i < kOutcomeClasses.size(); ++i) {
        row[std::string(terminal_name(kOutcomeClasses[i]))] = s.day_fractions[d][i];
      }
      per_day.push_back(row);
    }
    a["per_day"] = per_day;
    root[agent] = a;
  }
  return root.dump(2) + "\n";
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  return out;
}

void check(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

}  // namespace

void save_csv(std::span<const FlightRecord> records, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_csv(records, out);
  out.flush();
  check(out, path);
}

void save_jsonl(std::span<const FlightRecord> records, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_jsonl(records, out);
  out.flush();
  check(out, path);
}

void save_text(const std::string& text, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << text;
  out.flush();
  check(out, path);
}

}  // namespace aamcm::metrics
