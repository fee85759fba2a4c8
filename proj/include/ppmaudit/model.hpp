#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ppmaudit/timestamp.hpp"

namespace ppmaudit {

enum class AttributeKind { categorical, numeric, timestamp, boolean, integer };

std::string_view to_string(AttributeKind kind);
std::optional<AttributeKind> attribute_kind_from_string(std::string_view name);

// Typed context attribute. Numeric values are always finite.
class AttributeValue {
 public:
  static AttributeValue categorical(std::string value);
  static AttributeValue numeric(double value);  // throws InvalidArgument on NaN/inf
  static AttributeValue timestamp(Timestamp value);
  static AttributeValue boolean(bool value);
  static AttributeValue integer(std::int64_t value);

  AttributeKind kind() const noexcept { return static_cast<AttributeKind>(value_.index()); }

  const std::string& as_categorical() const { return std::get<0>(value_); }
  double as_numeric() const { return std::get<1>(value_); }
  Timestamp as_timestamp() const { return std::get<2>(value_); }
  bool as_boolean() const { return std::get<3>(value_); }
  std::int64_t as_integer() const { return std::get<4>(value_); }

  // Text form used by the CSV and XES writers. Numbers use the shortest
  // representation that parses back to the same value.
  std::string to_text() const;

  // Inverse of to_text for a known kind.
  static std::optional<AttributeValue> from_text(AttributeKind kind, std::string_view text);

  friend bool operator==(const AttributeValue&, const AttributeValue&) = default;

 private:
  using Storage = std::variant<std::string, double, Timestamp, bool, std::int64_t>;
  explicit AttributeValue(Storage value) : value_(std::move(value)) {}
  Storage value_;
};

using AttributeMap = std::map<std::string, AttributeValue, std::less<>>;

struct Event {
  Event(std::string activity, std::optional<Timestamp> timestamp = std::nullopt,
        AttributeMap attributes = {});

  std::string activity;
  std::optional<Timestamp> timestamp;
  AttributeMap attributes;

  friend bool operator==(const Event&, const Event&) = default;
};

// One case. Events are held behind a shared immutable buffer so that copies
// of the trace and the prefix samples cut from it stay cheap.
class Trace {
 public:
  Trace(std::string case_id, std::vector<Event> events, AttributeMap trace_attributes = {});

  const std::string& case_id() const noexcept { return case_id_; }
  std::span<const Event> events() const noexcept { return *events_; }
  std::size_t size() const noexcept { return events_->size(); }
  const AttributeMap& attributes() const noexcept { return attributes_; }
  const std::shared_ptr<const std::vector<Event>>& shared_events() const noexcept { return events_; }

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.case_id_ == b.case_id_ && *a.events_ == *b.events_ && a.attributes_ == b.attributes_;
  }

 private:
  std::string case_id_;
  std::shared_ptr<const std::vector<Event>> events_;
  AttributeMap attributes_;
};

class EventLog {
 public:
  EventLog() = default;
  // Throws InvalidArgument when two traces share a case id.
  EventLog(std::string name, std::vector<Trace> traces);

  const std::string& name() const noexcept { return name_; }
  std::span<const Trace> traces() const noexcept { return traces_; }
  std::size_t size() const noexcept { return traces_.size(); }
  bool empty() const noexcept { return traces_.empty(); }
  const std::set<std::string>& activity_alphabet() const noexcept { return alphabet_; }
  std::size_t event_count() const noexcept;

  const Trace* find(std::string_view case_id) const;

  friend bool operator==(const EventLog& a, const EventLog& b) {
    return a.name_ == b.name_ && a.traces_ == b.traces_;
  }

 private:
  std::string name_;
  std::vector<Trace> traces_;
  std::set<std::string> alphabet_;
  std::map<std::string, std::size_t, std::less<>> by_case_;
};

// Ordered activity projection of a prefix; the identity used for leakage.
class ControlFlowKey {
 public:
  ControlFlowKey() = default;
  explicit ControlFlowKey(std::vector<std::string> activities) : activities_(std::move(activities)) {}

  const std::vector<std::string>& activities() const noexcept { return activities_; }
  std::size_t size() const noexcept { return activities_.size(); }

  friend auto operator<=>(const ControlFlowKey&, const ControlFlowKey&) = default;
  friend bool operator==(const ControlFlowKey&, const ControlFlowKey&) = default;

 private:
  std::vector<std::string> activities_;
};

std::string to_string(const ControlFlowKey& key);  // "<A,B,C>"

// (prefix, next activity) pair cut from a trace. Shares the trace's event
// buffer, so it stays valid after the trace or log it came from is gone.
class PrefixSample {
 public:
  // 1 <= length <= trace.size() - 1, else InvalidArgument.
  PrefixSample(const Trace& trace, std::size_t length);

  const std::string& case_id() const noexcept { return case_id_; }
  std::span<const Event> prefix() const noexcept { return std::span<const Event>(*events_).first(length_); }
  std::size_t prefix_length() const noexcept { return length_; }
  const std::string& label() const noexcept { return (*events_)[length_].activity; }

 private:
  std::string case_id_;
  std::shared_ptr<const std::vector<Event>> events_;
  std::size_t length_;
};

// All n-1 prefix samples of a trace, shortest first.
std::vector<PrefixSample> make_prefix_samples(const Trace& trace);

// Throws InvalidArgument for an empty prefix.
ControlFlowKey control_flow_key(std::span<const Event> prefix);

// make_prefix_samples over the log's traces, in log order.
std::vector<PrefixSample> enumerate_log_samples(const EventLog& log);

std::size_t count_log_samples(const EventLog& log);

}  // namespace ppmaudit
