#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ppmaudit/error.hpp"
#include "ppmaudit/model.hpp"
#include "support/random_logs.hpp"

using namespace ppmaudit;
using namespace ppmaudit::testing;

namespace {

std::vector<std::string> activities(std::span<const Event> events) {
  std::vector<std::string> out;
  for (const auto& e : events) out.push_back(e.activity);
  return out;
}

}  // namespace

TEST(Timestamp, ParsesOffsetsAndFractions) {
  const auto a = parse_iso8601("2010-01-13T08:40:25.123+01:00");
  ASSERT_TRUE(a);
  EXPECT_EQ(format_iso8601(*a), "2010-01-13T07:40:25.123+00:00");
  EXPECT_EQ(parse_iso8601("2010-01-13T07:40:25.123456Z"), a);
  EXPECT_EQ(parse_iso8601("2010-01-13 07:40:25.123"), a);
  EXPECT_EQ(parse_iso8601("2022-05-01"), month_start(2022, 5));
  EXPECT_FALSE(parse_iso8601("2022-13-01T00:00:00"));
  EXPECT_FALSE(parse_iso8601("yesterday"));
}

TEST(Timestamp, FormatRoundTrips) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> ms(0, 4'000'000'000'000LL);
  for (int i = 0; i < 500; ++i) {
    const Timestamp ts{std::chrono::milliseconds(ms(rng))};
    EXPECT_EQ(parse_iso8601(format_iso8601(ts)), ts);
  }
}

TEST(Timestamp, CustomFormat) {
  EXPECT_EQ(parse_timestamp("2023/04/01 00:00:00", "%Y/%m/%d %H:%M:%S"), month_start(2023, 4));
  EXPECT_EQ(parse_timestamp("2023/04/01 00:00:00.250", "%Y/%m/%d %H:%M:%S"),
            month_start(2023, 4) + std::chrono::milliseconds(250));
  EXPECT_FALSE(parse_timestamp("2023/04/01 junk", "%Y/%m/%d %H:%M:%S"));
}

TEST(AttributeValue, RejectsNonFinite) {
  EXPECT_THROW(AttributeValue::numeric(std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
  EXPECT_THROW(AttributeValue::numeric(std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST(AttributeValue, TextRoundTrip) {
  const std::vector<AttributeValue> values = {
      AttributeValue::categorical("R1"), AttributeValue::numeric(499),  AttributeValue::numeric(0.1),
      AttributeValue::numeric(-1e-300),  AttributeValue::boolean(true), AttributeValue::integer(-42),
      AttributeValue::timestamp(month_start(2023, 5))};
  for (const auto& v : values) {
    EXPECT_EQ(AttributeValue::from_text(v.kind(), v.to_text()), v) << v.to_text();
  }
  EXPECT_FALSE(AttributeValue::from_text(AttributeKind::numeric, "abc"));
  EXPECT_FALSE(AttributeValue::from_text(AttributeKind::boolean, "maybe"));
}

TEST(Event, RequiresActivity) { EXPECT_THROW(Event(""), InvalidArgument); }

TEST(Trace, Invariants) {
  EXPECT_THROW(Trace("c", {}), InvalidArgument);
  const auto t0 = month_start(2022, 5);
  std::vector<Event> backwards = {Event("A", t0), Event("B", t0 - std::chrono::hours(1))};
  EXPECT_THROW(Trace("c", backwards), InvalidArgument);
  std::vector<Event> equal = {Event("A", t0), Event("B", t0)};
  EXPECT_NO_THROW(Trace("c", equal));
  // Partially stamped traces are not ordered by time.
  std::vector<Event> partial = {Event("A", t0), Event("B")};
  EXPECT_NO_THROW(Trace("c", partial));
}

TEST(EventLog, DuplicateCaseIdsRejected) {
  std::vector<Trace> traces = {Trace("x", events_of({"A"})), Trace("x", events_of({"B"}))};
  EXPECT_THROW(EventLog("dup", traces), InvalidArgument);
}

TEST(EventLog, AlphabetAndLookup) {
  const auto log = log_of({{"A", "B", "C"}, {"A", "D"}});
  EXPECT_EQ(log.activity_alphabet(), (std::set<std::string>{"A", "B", "C", "D"}));
  EXPECT_EQ(log.event_count(), 5u);
  ASSERT_NE(log.find("c2"), nullptr);
  EXPECT_EQ(log.find("c2")->size(), 2u);
  EXPECT_EQ(log.find("nope"), nullptr);
}

TEST(PrefixSamples, Unfolding) {
  const Trace abc("t", events_of({"A", "B", "C"}));
  const auto samples = make_prefix_samples(abc);
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(activities(samples[0].prefix()), (std::vector<std::string>{"A"}));
  EXPECT_EQ(samples[0].label(), "B");
  EXPECT_EQ(activities(samples[1].prefix()), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(samples[1].label(), "C");

  EXPECT_TRUE(make_prefix_samples(Trace("t", events_of({"A"}))).empty());

  const auto loop = make_prefix_samples(Trace("t", events_of({"A", "B", "B", "C", "D"})));
  ASSERT_EQ(loop.size(), 4u);
  EXPECT_EQ(activities(loop.back().prefix()), (std::vector<std::string>{"A", "B", "B", "C"}));
  EXPECT_EQ(loop.back().label(), "D");
}

TEST(PrefixSamples, LengthBounds) {
  const Trace abc("t", events_of({"A", "B", "C"}));
  EXPECT_THROW(PrefixSample(abc, 0), InvalidArgument);
  EXPECT_THROW(PrefixSample(abc, 3), InvalidArgument);
  EXPECT_NO_THROW(PrefixSample(abc, 2));
}

TEST(PrefixSamples, OutliveTheirLog) {
  std::vector<PrefixSample> samples;
  {
    const auto log = log_of({{"A", "B", "C"}});
    samples = enumerate_log_samples(log);
  }
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[1].label(), "C");
  EXPECT_EQ(samples[1].case_id(), "c1");
}

TEST(ControlFlowKey, ProjectsActivities) {
  std::vector<Event> resourced = {Event("A", std::nullopt, {{"org:resource", AttributeValue::categorical("R1")}}),
                                  Event("B", std::nullopt, {{"org:resource", AttributeValue::categorical("R100")}})};
  EXPECT_EQ(control_flow_key(resourced), ControlFlowKey({"A", "B"}));
  EXPECT_EQ(control_flow_key(events_of({"A", "B", "C1"})), ControlFlowKey({"A", "B", "C1"}));

  auto costed = [](double c) {
    return std::vector<Event>{Event("A", std::nullopt, {{"cost", AttributeValue::numeric(c)}}),
                              Event("B", std::nullopt, {{"cost", AttributeValue::numeric(c)}})};
  };
  EXPECT_EQ(control_flow_key(costed(2)), control_flow_key(costed(499)));
  EXPECT_THROW(control_flow_key({}), InvalidArgument);
  EXPECT_EQ(to_string(ControlFlowKey({"A", "B"})), "<A,B>");
}

TEST(ControlFlowKey, OrderIsElementWise) {
  EXPECT_LT(ControlFlowKey({"A"}), ControlFlowKey({"A", "B"}));
  EXPECT_LT(ControlFlowKey({"A", "B"}), ControlFlowKey({"B"}));
  EXPECT_NE(ControlFlowKey({"A", "B"}), ControlFlowKey({"B", "A"}));
}

TEST(EnumerateLogSamples, Counts) {
  EXPECT_EQ(enumerate_log_samples(log_of({{"A", "B", "C"}})).size(), 2u);
  EXPECT_EQ(enumerate_log_samples(log_of({{"A", "B", "C", "D"}, {"A", "B", "B", "C", "D"}})).size(), 7u);
  EXPECT_TRUE(enumerate_log_samples(EventLog()).empty());
}

TEST(ModelProperties, RoundTripAndCountLaw) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 100; ++round) {
    const auto log = random_log(rng, {});
    const auto samples = enumerate_log_samples(log);
    std::size_t expected = 0;
    for (const auto& t : log.traces()) expected += t.size() - 1;
    ASSERT_EQ(samples.size(), expected);
    ASSERT_EQ(count_log_samples(log), expected);

    std::size_t i = 0;
    for (const auto& t : log.traces()) {
      const auto events = t.events();
      for (std::size_t p = 1; p < events.size(); ++p, ++i) {
        auto joined = activities(samples[i].prefix());
        joined.push_back(samples[i].label());
        ASSERT_EQ(joined, activities(events.first(p + 1)));
        ASSERT_EQ(samples[i].case_id(), t.case_id());
      }
    }
  }
}
