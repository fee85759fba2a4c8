#include "ppmaudit/model.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "ppmaudit/error.hpp"

namespace ppmaudit {

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::categorical: return "categorical";
    case AttributeKind::numeric: return "numeric";
    case AttributeKind::timestamp: return "timestamp";
    case AttributeKind::boolean: return "boolean";
    case AttributeKind::integer: return "integer";
  }
  return "unknown";
}

std::optional<AttributeKind> attribute_kind_from_string(std::string_view name) {
  for (auto kind : {AttributeKind::categorical, AttributeKind::numeric, AttributeKind::timestamp,
                    AttributeKind::boolean, AttributeKind::integer}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

AttributeValue AttributeValue::categorical(std::string value) { return AttributeValue(Storage{std::move(value)}); }

AttributeValue AttributeValue::numeric(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("numeric attribute value must be finite");
  return AttributeValue(Storage{std::in_place_index<1>, value});
}

AttributeValue AttributeValue::timestamp(Timestamp value) { return AttributeValue(Storage{std::in_place_index<2>, value}); }

AttributeValue AttributeValue::boolean(bool value) { return AttributeValue(Storage{std::in_place_index<3>, value}); }

AttributeValue AttributeValue::integer(std::int64_t value) {
  return AttributeValue(Storage{std::in_place_index<4>, value});
}

std::string AttributeValue::to_text() const {
  switch (kind()) {
    case AttributeKind::categorical:
      return as_categorical();
    case AttributeKind::numeric: {
      char buf[64];
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, as_numeric());
      return std::string(buf, end);
    }
    case AttributeKind::timestamp:
      return format_iso8601(as_timestamp());
    case AttributeKind::boolean:
      return as_boolean() ? "true" : "false";
    case AttributeKind::integer:
      return std::to_string(as_integer());
  }
  return {};
}

std::optional<AttributeValue> AttributeValue::from_text(AttributeKind kind, std::string_view text) {
  switch (kind) {
    case AttributeKind::categorical:
      return categorical(std::string(text));
    case AttributeKind::numeric: {
      double v = 0;
      const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
      return numeric(v);
    }
    case AttributeKind::timestamp: {
      const auto ts = parse_iso8601(text);
      if (!ts) return std::nullopt;
      return timestamp(*ts);
    }
    case AttributeKind::boolean: {
      if (text == "true" || text == "TRUE" || text == "True" || text == "1") return boolean(true);
      if (text == "false" || text == "FALSE" || text == "False" || text == "0") return boolean(false);
      return std::nullopt;
    }
    case AttributeKind::integer: {
      std::int64_t v = 0;
      const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
      return integer(v);
    }
  }
  return std::nullopt;
}

Event::Event(std::string activity_, std::optional<Timestamp> timestamp_, AttributeMap attributes_)
    : activity(std::move(activity_)), timestamp(timestamp_), attributes(std::move(attributes_)) {
  if (activity.empty()) throw InvalidArgument("event activity must be non-empty");
}

Trace::Trace(std::string case_id, std::vector<Event> events, AttributeMap trace_attributes)
    : case_id_(std::move(case_id)), attributes_(std::move(trace_attributes)) {
  if (events.empty()) throw InvalidArgument("trace '" + case_id_ + "' has no events");
  bool all_stamped = true;
  for (const auto& e : events) all_stamped = all_stamped && e.timestamp.has_value();
  if (all_stamped) {
    for (std::size_t i = 1; i < events.size(); ++i) {
      if (*events[i].timestamp < *events[i - 1].timestamp) {
        throw InvalidArgument("trace '" + case_id_ + "': timestamps decrease at event " + std::to_string(i + 1));
      }
    }
  }
  events_ = std::make_shared<const std::vector<Event>>(std::move(events));
}

EventLog::EventLog(std::string name, std::vector<Trace> traces) : name_(std::move(name)), traces_(std::move(traces)) {
  for (std::size_t i = 0; i < traces_.size(); ++i) {
    const auto& t = traces_[i];
    if (!by_case_.emplace(t.case_id(), i).second) {
      throw InvalidArgument("duplicate case id '" + t.case_id() + "'");
    }
    for (const auto& e : t.events()) alphabet_.insert(e.activity);
  }
}

std::size_t EventLog::event_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : traces_) n += t.size();
  return n;
}

const Trace* EventLog::find(std::string_view case_id) const {
  const auto it = by_case_.find(case_id);
  return it == by_case_.end() ? nullptr : &traces_[it->second];
}

std::string to_string(const ControlFlowKey& key) {
  std::string out = "<";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i > 0) out += ',';
    out += key.activities()[i];
  }
  out += '>';
  return out;
}

PrefixSample::PrefixSample(const Trace& trace, std::size_t length)
    : case_id_(trace.case_id()), events_(trace.shared_events()), length_(length) {
  if (length < 1 || length >= trace.size()) {
    throw InvalidArgument("prefix length " + std::to_string(length) + " out of range for trace of length " +
                          std::to_string(trace.size()));
  }
}

std::vector<PrefixSample> make_prefix_samples(const Trace& trace) {
  std::vector<PrefixSample> out;
  out.reserve(trace.size() - 1);
  for (std::size_t p = 1; p < trace.size(); ++p) out.emplace_back(trace, p);
  return out;
}

ControlFlowKey control_flow_key(std::span<const Event> prefix) {
  if (prefix.empty()) throw InvalidArgument("control-flow key of an empty prefix");
  std::vector<std::string> activities;
  activities.reserve(prefix.size());
  for (const auto& e : prefix) activities.push_back(e.activity);
  return ControlFlowKey(std::move(activities));
}

std::vector<PrefixSample> enumerate_log_samples(const EventLog& log) {
  std::vector<PrefixSample> out;
  out.reserve(count_log_samples(log));
  for (const auto& t : log.traces()) {
    for (std::size_t p = 1; p < t.size(); ++p) out.emplace_back(t, p);
  }
  return out;
}

std::size_t count_log_samples(const EventLog& log) {
  std::size_t n = 0;
  for (const auto& t : log.traces()) n += t.size() - 1;
  return n;
}

}  // namespace ppmaudit
