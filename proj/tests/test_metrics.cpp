#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "aamcm/error.hpp"
#include "aamcm/metrics.hpp"

using namespace aamcm;
using namespace aamcm::metrics;

namespace {

FlightRecord rec(int day, int id, TerminalState t, std::string agent = "heuristic") {
  FlightRecord r;
  r.flight_id = day * kDayStride + id;
  r.agent = std::move(agent);
  r.terminal = t;
  return r;
}

std::vector<FlightRecord> random_records(Rng& rng, int n) {
  std::vector<FlightRecord> out;
  for (int i = 0; i < n; ++i) {
    auto r = rec(static_cast<int>(rng.uniform_index(5)), i,
                 kOutcomeClasses[rng.uniform_index(kOutcomeClasses.size())],
                 rng.bernoulli(0.5) ? "heuristic" : "unequipped");
    r.total_reward = rng.normal(0.0, 3.0);
    r.flight_time_s = rng.uniform(0.0, 5000.0);
    r.actions = static_cast<int>(rng.uniform_index(300));
    r.pc_terminal = rng.bernoulli(0.3) ? 0.0 : rng.uniform() * 1e-3;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("csv and jsonl round trip") {
  Rng rng(1);
  const auto recs = random_records(rng, 100);
  std::stringstream csv;
  write_csv(recs, csv);
  std::string header;
  std::getline(std::istringstream(csv.str()), header);
  CHECK(header == "flight_id,agent,terminal,total_reward,flight_time_s,actions,pc_terminal");
  const auto back = read_csv(csv);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(back[i].same_columns(recs[i]));

  std::stringstream jl;
  write_jsonl(recs, jl);
  const auto text = jl.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 100);
  const auto first = nlohmann::ordered_json::parse(text.substr(0, text.find('\n')));
  std::vector<std::string> keys;
  for (const auto& [k, v] : first.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"flight_id", "agent", "terminal", "total_reward", "flight_time_s",
                                         "actions", "pc_terminal"});
  const auto jback = read_jsonl(jl);
  REQUIRE(jback.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(jback[i].same_columns(recs[i]));
}

TEST_CASE("malformed record files") {
  std::istringstream bad_header("id,agent\n");
  CHECK_THROWS_AS(read_csv(bad_header), Error);
  std::istringstream bad_term(std::string(kCsvHeader) + "\n1,h,Exploded,0,0,0,0\n");
  try {
    read_csv(bad_term);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream bad_json("{\"flight_id\": 1\n");
  CHECK_THROWS_AS(read_jsonl(bad_json), Error);
}

TEST_CASE("io errors") {
  const auto path = std::filesystem::path("/nonexistent-dir/x/records.csv");
  try {
    save_csv({}, path);
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IoError);
  }
  CHECK_THROWS_AS(save_text("{}", path), Error);
}

TEST_CASE("summaries") {
  std::vector<FlightRecord> all_dest;
  for (int i = 0; i < 10; ++i) all_dest.push_back(rec(0, i, TerminalState::ReachedDestination));
  auto s = summarize(all_dest);
  CHECK(s.mean[0] == 1.0);
  for (std::size_t i = 1; i < 6; ++i) CHECK(s.mean[i] == 0.0);
  CHECK_FALSE(s.ci_halfwidth.has_value());
  CHECK(s.flights == 10);

  // Day 0: 2/5 at destination, day 1: 3/5.
  std::vector<FlightRecord> two;
  for (int i = 0; i < 5; ++i) two.push_back(rec(0, i, i < 2 ? TerminalState::ReachedDestination : TerminalState::LossOfControl));
  for (int i = 0; i < 5; ++i) two.push_back(rec(1, i, i < 3 ? TerminalState::ReachedDestination : TerminalState::OutOfEnergy));
  two.push_back(rec(1, 9, TerminalState::TimedOut));
  s = summarize(two);
  CHECK(s.mean[0] == doctest::Approx(0.5));
  CHECK(s.timed_out == 1);
  CHECK(s.flights == 10);
  CHECK(s.days == std::vector<int>{0, 1});
  REQUIRE(s.ci_halfwidth.has_value());
  CHECK(s.vertiports_reached.mean == doctest::Approx(0.5));

  CHECK_THROWS_AS(summarize(std::vector<FlightRecord>{}), Error);
  try {
    summarize(std::vector<FlightRecord>{rec(0, 0, TerminalState::TimedOut)});
    FAIL("expected EmptyEvaluation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyEvaluation);
  }
  try {
    summarize(std::vector<FlightRecord>{rec(0, 0, TerminalState::Active)});
    FAIL("expected InvalidTerminal");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidTerminal);
  }
}

TEST_CASE("fractions partition unity and ignore ordering") {
  Rng rng(2);
  auto recs = random_records(rng, 500);
  const auto by = summarize_by_agent(recs, 3);
  CHECK(by.size() == 2);
  for (const auto& [agent, s] : by) {
    CHECK(s.agent == agent);
    for (const auto& f : s.day_fractions) CHECK(std::accumulate(f.begin(), f.end(), 0.0) == doctest::Approx(1.0));
    CHECK(std::accumulate(s.mean.begin(), s.mean.end(), 0.0) == doctest::Approx(1.0));
  }
  std::reverse(recs.begin(), recs.end());
  std::swap(recs[3], recs[77]);
  const auto again = summarize_by_agent(recs, 3);
  for (const auto& [agent, s] : by) {
    const auto& t = again.at(agent);
    CHECK(s.mean == t.mean);
    CHECK(*s.ci_halfwidth == *t.ci_halfwidth);
    CHECK(s.vertiports_reached.halfwidth == t.vertiports_reached.halfwidth);
  }
  const auto json = nlohmann::ordered_json::parse(summary_json(by));
  CHECK(json.contains("heuristic"));
  CHECK(json["heuristic"]["classes"].contains("ReachedDestination"));
  CHECK(json["heuristic"]["classes"]["LossOfControl"].contains("ci_halfwidth"));
}

TEST_CASE("bootstrap intervals") {
  Rng rng(4);
  const std::vector<double> constant(10, 0.3);
  auto ci = bootstrap_ci(constant, rng);
  CHECK(ci.mean == doctest::Approx(0.3));
  CHECK(ci.halfwidth == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<double> coin;
  for (int i = 0; i < 100; ++i) coin.push_back(i % 2);
  ci = bootstrap_ci(coin, rng);
  CHECK(ci.mean == 0.5);
  const double expected = 2.0 * std::sqrt(0.25 / 100.0);
  CHECK(std::abs(ci.halfwidth - expected) < 0.1 * expected);

  Rng a(9), b(9);
  const auto x = bootstrap_ci(coin, a);
  const auto y = bootstrap_ci(coin, b);
  CHECK(x.halfwidth == y.halfwidth);

  try {
    bootstrap_ci(std::vector<double>{0.5}, rng);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientData);
  }
  try {
    bootstrap_ci(std::vector<double>{}, rng);
    FAIL("expected EmptyEvaluation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyEvaluation);
  }
}

TEST_CASE("interval shrinks with more days") {
  Rng data(12);
  int shrunk = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> small, large;
    for (int i = 0; i < 10; ++i) small.push_back(data.uniform());
    for (int i = 0; i < 40; ++i) large.push_back(data.uniform());
    Rng r1(trial), r2(trial + 100);
    shrunk += bootstrap_ci(small, r1).halfwidth > bootstrap_ci(large, r2).halfwidth;
  }
  CHECK(shrunk >= 18);
}
