#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ppmaudit/model.hpp"

namespace ppmaudit::testing {

struct RandomLogShape {
  int max_activities = 8;
  int max_traces = 50;
  int max_length = 12;
  bool attributes = false;   // random resource/cost attributes on events
  bool timestamps = false;   // strictly increasing per trace
};

inline std::string activity_name(int i) { return std::string(1, static_cast<char>('A' + i)); }

// Traces over a random alphabet size in [1, max_activities]; trace lengths in
// [1, max_length]; between 1 and max_traces traces.
inline EventLog random_log(std::mt19937_64& rng, const RandomLogShape& shape, const std::string& name = "random") {
  std::uniform_int_distribution<int> n_act(1, shape.max_activities);
  std::uniform_int_distribution<int> n_traces(1, shape.max_traces);
  std::uniform_int_distribution<int> length(1, shape.max_length);
  const int alphabet = n_act(rng);
  std::uniform_int_distribution<int> pick(0, alphabet - 1);
  std::uniform_int_distribution<int> resource(1, 5);
  std::uniform_real_distribution<double> cost(0.0, 1000.0);
  std::uniform_int_distribution<int> minutes(1, 600);

  std::vector<Trace> traces;
  const int count = n_traces(rng);
  for (int t = 0; t < count; ++t) {
    std::vector<Event> events;
    const int len = length(rng);
    auto clock = month_start(2020, 1) + std::chrono::hours(24 * t);
    for (int i = 0; i < len; ++i) {
      AttributeMap attrs;
      if (shape.attributes) {
        attrs.emplace("org:resource", AttributeValue::categorical("R" + std::to_string(resource(rng))));
        attrs.emplace("cost", AttributeValue::numeric(cost(rng)));
      }
      std::optional<Timestamp> ts;
      if (shape.timestamps) {
        clock += std::chrono::minutes(minutes(rng));
        ts = clock;
      }
      events.emplace_back(activity_name(pick(rng)), ts, std::move(attrs));
    }
    traces.emplace_back("case" + std::to_string(t), std::move(events));
  }
  return EventLog(name, std::move(traces));
}

// Every control-flow key has exactly one observed next activity: the next
// activity is a fixed function of the prefix so far.
inline EventLog random_unambiguous_log(std::mt19937_64& rng, int max_activities, int max_traces, int max_length) {
  std::uniform_int_distribution<int> n_act(2, max_activities);
  std::uniform_int_distribution<int> n_traces(1, max_traces);
  std::uniform_int_distribution<int> length(1, max_length);
  const int alphabet = n_act(rng);
  std::uniform_int_distribution<int> start(0, alphabet - 1);
  const std::uint64_t salt = rng();

  std::vector<Trace> traces;
  const int count = n_traces(rng);
  for (int t = 0; t < count; ++t) {
    std::vector<Event> events;
    std::uint64_t h = salt ^ 0x9e3779b97f4a7c15ULL;
    int a = start(rng);
    const int len = length(rng);
    for (int i = 0; i < len; ++i) {
      events.emplace_back(activity_name(a));
      h = (h ^ static_cast<std::uint64_t>(a + 1)) * 0x100000001b3ULL;
      a = static_cast<int>((h >> 17) % static_cast<std::uint64_t>(alphabet));
    }
    traces.emplace_back("case" + std::to_string(t), std::move(events));
  }
  return EventLog("unambiguous", std::move(traces));
}

inline EventLog log_of(std::initializer_list<std::vector<std::string>> rows, const std::string& name = "log") {
  std::vector<Trace> traces;
  int i = 0;
  for (const auto& row : rows) {
    std::vector<Event> events;
    for (const auto& a : row) events.emplace_back(a);
    traces.emplace_back("c" + std::to_string(++i), std::move(events));
  }
  return EventLog(name, std::move(traces));
}

inline std::vector<Event> events_of(std::initializer_list<const char*> activities) {
  std::vector<Event> out;
  for (const auto* a : activities) out.emplace_back(a);
  return out;
}

}  // namespace ppmaudit::testing
