#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ppmaudit/error.hpp"
#include "ppmaudit/scenarios.hpp"
#include "ppmaudit/splitter.hpp"
#include "support/random_logs.hpp"

using namespace ppmaudit;
using namespace ppmaudit::testing;

namespace {

EventLog numbered_log(int n) {
  std::vector<Trace> traces;
  for (int i = 0; i < n; ++i) {
    traces.emplace_back("case" + std::to_string(i), events_of({"A", "B"}));
  }
  return EventLog("numbered", std::move(traces));
}

EventLog started_log(const std::vector<std::pair<std::string, Timestamp>>& starts) {
  std::vector<Trace> traces;
  for (const auto& [id, ts] : starts) traces.emplace_back(id, std::vector<Event>{Event("A", ts), Event("B", ts)});
  return EventLog("started", std::move(traces));
}

void expect_partition(const EventLog& log, const SplitManifest& m) {
  std::vector<std::string> all(m.train_case_ids);
  all.insert(all.end(), m.test_case_ids.begin(), m.test_case_ids.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
  std::vector<std::string> ids;
  for (const auto& t : log.traces()) ids.push_back(t.case_id());
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(all, ids);
  EXPECT_TRUE(std::is_sorted(m.train_case_ids.begin(), m.train_case_ids.end()));
  EXPECT_TRUE(std::is_sorted(m.test_case_ids.begin(), m.test_case_ids.end()));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST(TestSetSize, Rule) {
  EXPECT_EQ(test_set_size(0.2, 10), 2u);
  EXPECT_EQ(test_set_size(0.2, 3), 1u);
  EXPECT_EQ(test_set_size(0.29, 100), 29u);
  EXPECT_EQ(test_set_size(0.01, 5), 1u);
  EXPECT_EQ(test_set_size(0.34, 3), 1u);
}

TEST(SplitRandom, Sizes) {
  const auto m = split_random(numbered_log(10), 0.2, 1);
  EXPECT_EQ(m.test_case_ids.size(), 2u);
  EXPECT_EQ(m.train_case_ids.size(), 8u);
  EXPECT_EQ(split_random(numbered_log(3), 0.2, 1).test_case_ids.size(), 1u);
}

TEST(SplitRandom, Deterministic) {
  const auto log = numbered_log(40);
  EXPECT_EQ(split_random(log, 0.2, 17), split_random(log, 0.2, 17));
  EXPECT_NE(split_random(log, 0.2, 17).test_case_ids, split_random(log, 0.2, 18).test_case_ids);
}

TEST(SplitRandom, IndependentOfTraceOrder) {
  auto log = numbered_log(25);
  std::vector<Trace> reversed(log.traces().rbegin(), log.traces().rend());
  const EventLog flipped("numbered", std::move(reversed));
  EXPECT_EQ(split_random(log, 0.2, 5), split_random(flipped, 0.2, 5));
}

TEST(SplitRandom, GoldenManifest) {
  const auto text = manifest_to_json(split_random(numbered_log(10), 0.2, 1));
  EXPECT_EQ(text, read_file(PPMAUDIT_GOLDEN_DIR "/manifest_numbered10_seed1.json"));
}

TEST(SplitRandom, InvalidArguments) {
  EXPECT_THROW(split_random(numbered_log(1), 0.2, 1), InvalidArgument);
  EXPECT_THROW(split_random(numbered_log(10), 0.0, 1), InvalidArgument);
  EXPECT_THROW(split_random(numbered_log(10), 1.0, 1), InvalidArgument);
}

TEST(SplitTemporal, MostRecentTraces) {
  const auto log = started_log({{"jan", month_start(2022, 1)},
                                {"may", month_start(2022, 5)},
                                {"mar", month_start(2022, 3)},
                                {"feb", month_start(2022, 2)},
                                {"apr", month_start(2022, 4)}});
  const auto m = split_temporal(log, 0.2);
  EXPECT_EQ(m.test_case_ids, (std::vector<std::string>{"may"}));
  EXPECT_FALSE(m.spec.seed);
  expect_partition(log, m);
}

TEST(SplitTemporal, TiesBreakOnCaseId) {
  const auto same = month_start(2022, 1);
  const auto log = started_log({{"b", same}, {"a", same}});
  EXPECT_EQ(split_temporal(log, 0.2).test_case_ids, (std::vector<std::string>{"b"}));
}

TEST(SplitTemporal, DriftScenario) {
  const auto l6 = generate(ScenarioId::L6_drift).training_log;
  const auto m = split_temporal(l6, 0.34);
  ASSERT_EQ(m.test_case_ids.size(), 1u);
  const auto* t = l6.find(m.test_case_ids[0]);
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->events()[0].timestamp, month_start(2023, 4));
}

TEST(SplitTemporal, RequiresTimestamps) {
  EXPECT_THROW(split_temporal(numbered_log(5), 0.2), InvalidArgument);
}

TEST(Materialize, Examples) {
  const auto log = numbered_log(10);
  const auto m = split_random(log, 0.3, 9);
  const auto [train, test] = materialize(log, m);
  EXPECT_EQ(train.size(), 7u);
  EXPECT_EQ(test.size(), 3u);
  EXPECT_EQ(materialize(log, m), materialize(log, m));

  auto swapped = m;
  std::swap(swapped.train_case_ids, swapped.test_case_ids);
  const auto [train2, test2] = materialize(log, swapped);
  EXPECT_EQ(train2.traces().size(), test.traces().size());
  for (std::size_t i = 0; i < test.size(); ++i) EXPECT_EQ(train2.traces()[i], test.traces()[i]);

  SplitManifest whole{m.spec, log.name(), {}, {}};
  for (const auto& t : log.traces()) whole.train_case_ids.push_back(t.case_id());
  std::sort(whole.train_case_ids.begin(), whole.train_case_ids.end());
  const auto [all, none] = materialize(log, whole);
  EXPECT_EQ(all.traces().size(), log.size());
  EXPECT_TRUE(none.empty());
}

TEST(Materialize, Inconsistencies) {
  const auto log = numbered_log(4);
  auto m = split_random(log, 0.25, 1);
  auto unknown = m;
  unknown.test_case_ids = {"ghost"};
  EXPECT_THROW(materialize(log, unknown), InconsistencyError);
  auto missing = m;
  missing.train_case_ids.pop_back();
  EXPECT_THROW(materialize(log, missing), InconsistencyError);
  auto overlap = m;
  overlap.test_case_ids.push_back(overlap.train_case_ids.front());
  std::sort(overlap.test_case_ids.begin(), overlap.test_case_ids.end());
  EXPECT_THROW(materialize(log, overlap), InconsistencyError);
}

TEST(Manifest, JsonRoundTrip) {
  std::mt19937_64 rng(1);
  auto stamped = random_log(rng, {.max_traces = 30, .timestamps = true});
  while (stamped.size() < 2) stamped = random_log(rng, {.max_traces = 30, .timestamps = true});
  for (const auto& m : {split_random(numbered_log(12), 0.25, 123456789012345ULL), split_temporal(stamped, 0.2)}) {
    const auto text = manifest_to_json(m);
    EXPECT_EQ(manifest_from_json(text), m);
    EXPECT_EQ(manifest_to_json(manifest_from_json(text)), text);
  }
  EXPECT_THROW(manifest_from_json("{"), ParseError);
  EXPECT_THROW(manifest_from_json("{\"method\": \"random\"}"), ParseError);
}

TEST(SplitProperties, PartitionsOnRandomLogs) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto log = random_log(rng, {.timestamps = true});
    if (log.size() < 2) continue;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto m = split_random(log, 0.2, seed);
      expect_partition(log, m);
      EXPECT_EQ(m.test_case_ids.size(), test_set_size(0.2, log.size()));
    }
    const auto t = split_temporal(log, 0.2);
    expect_partition(log, t);
    EXPECT_EQ(t.test_case_ids.size(), test_set_size(0.2, log.size()));
  }
}
