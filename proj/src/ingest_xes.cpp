#include <expat.h>

#include <cstring>
#include <ostream>
#include <set>

#include "ppmaudit/error.hpp"
#include "ppmaudit/ingest.hpp"
#include "ingest_internal.hpp"

namespace ppmaudit {
namespace {

constexpr std::string_view kConceptName = "concept:name";
constexpr std::string_view kTimestamp = "time:timestamp";

std::optional<AttributeKind> kind_of_element(std::string_view tag) {
  if (tag == "string" || tag == "id") return AttributeKind::categorical;
  if (tag == "date") return AttributeKind::timestamp;
  if (tag == "int") return AttributeKind::integer;
  if (tag == "float") return AttributeKind::numeric;
  if (tag == "boolean") return AttributeKind::boolean;
  return std::nullopt;
}

bool is_attribute_element(std::string_view tag) {
  return kind_of_element(tag).has_value() || tag == "list" || tag == "container";
}

// Which element receives a top-level attribute.
enum class Owner { log, trace, event };

struct PendingEvent {
  std::optional<std::string> activity;
  std::optional<Timestamp> timestamp;
  AttributeMap attributes;
};

struct PendingTrace {
  std::optional<std::string> case_id;
  AttributeMap attributes;
  std::vector<Event> events;
};

class XesBuilder {
 public:
  XesBuilder(XML_Parser parser, std::string fallback_name) : parser_(parser), log_name_(std::move(fallback_name)) {}

  void start(std::string_view tag, const XML_Char** atts) {
    if (ignored_depth_ > 0) {
      ++ignored_depth_;
      return;
    }
    if (tag == "global" || tag == "extension" || tag == "classifier") {
      ignored_depth_ = 1;
      return;
    }
    if (tag == "log") {
      return;
    }
    if (tag == "trace") {
      trace_.emplace();
      ++trace_index_;
      return;
    }
    if (tag == "event") {
      if (!trace_) {
        warn("event outside of a trace ignored");
        ignored_depth_ = 1;
        return;
      }
      event_.emplace();
      return;
    }
    if (tag == "values") {
      // XES 1.0 list wrapper; its children belong to the enclosing list.
      attr_path_.push_back(attr_path_.empty() ? std::string() : attr_path_.back());
      return;
    }
    if (!is_attribute_element(tag)) {
      warn("unknown element <" + std::string(tag) + "> ignored");
      ignored_depth_ = 1;
      return;
    }

    std::string key;
    std::optional<std::string> value;
    for (int i = 0; atts[i] != nullptr; i += 2) {
      if (std::strcmp(atts[i], "key") == 0) key = atts[i + 1];
      if (std::strcmp(atts[i], "value") == 0) value = atts[i + 1];
    }
    const bool top_level = attr_path_.empty();
    std::string name = top_level || attr_path_.back().empty() ? key : attr_path_.back() + "/" + key;
    attr_path_.push_back(name);

    const auto kind = kind_of_element(tag);
    if (!kind || !value) return;  // list/container, or valueless element
    store(*kind, std::move(name), *value, top_level);
  }

  void end(std::string_view tag) {
    if (ignored_depth_ > 0) {
      --ignored_depth_;
      return;
    }
    if (tag == "event") {
      finish_event();
    } else if (tag == "trace") {
      finish_trace();
    } else if ((is_attribute_element(tag) || tag == "values") && !attr_path_.empty()) {
      attr_path_.pop_back();
    }
  }

  IngestResult finish() {
    try {
      report_.traces_read = traces_.size();
      return IngestResult{EventLog(log_name_, std::move(traces_)), std::move(report_)};
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what());
    }
  }

  const std::optional<std::string>& error() const { return error_; }
  std::size_t error_line() const { return error_line_; }

 private:
  Owner owner() const {
    if (event_) return Owner::event;
    if (trace_) return Owner::trace;
    return Owner::log;
  }

  std::string location() const { return "line " + std::to_string(XML_GetCurrentLineNumber(parser_)); }

  void warn(std::string message) { report_.warnings.push_back({location(), std::move(message)}); }

  void fail(std::string message) {
    if (!error_) {
      error_ = std::move(message);
      error_line_ = XML_GetCurrentLineNumber(parser_);
    }
    XML_StopParser(parser_, XML_FALSE);
  }

  void store(AttributeKind kind, std::string name, const std::string& text, bool top_level) {
    const Owner who = owner();
    if (top_level && name == kConceptName) {
      if (who == Owner::event) event_->activity = text;
      if (who == Owner::trace) trace_->case_id = text;
      if (who == Owner::log) log_name_ = text;
      return;
    }
    if (top_level && who == Owner::event && name == kTimestamp) {
      const auto ts = parse_iso8601(text);
      if (!ts) {
        warn("unparseable event timestamp '" + text + "' dropped");
        return;
      }
      event_->timestamp = *ts;
      return;
    }

    std::optional<AttributeValue> value;
    try {
      value = AttributeValue::from_text(kind, text);
    } catch (const InvalidArgument&) {
      value.reset();
    }
    if (!value) {
      warn("attribute '" + name + "': cannot read '" + text + "' as " + std::string(to_string(kind)));
      return;
    }
    AttributeMap* target = nullptr;
    if (who == Owner::event) target = &event_->attributes;
    if (who == Owner::trace) target = &trace_->attributes;
    if (target == nullptr) return;  // log-level attributes other than the name are not modelled
    if (!target->emplace(name, std::move(*value)).second) {
      warn("duplicate attribute '" + name + "' ignored");
    }
  }

  void finish_event() {
    PendingEvent pending = std::move(*event_);
    event_.reset();
    if (!pending.activity || pending.activity->empty()) {
      ++report_.rows_skipped;
      warn("event without concept:name skipped");
      return;
    }
    trace_->events.emplace_back(std::move(*pending.activity), pending.timestamp, std::move(pending.attributes));
    ++report_.events_read;
  }

  void finish_trace() {
    PendingTrace pending = std::move(*trace_);
    trace_.reset();
    if (!pending.case_id) {
      pending.case_id = "trace_" + std::to_string(trace_index_ - 1);
      warn("trace without concept:name; using '" + *pending.case_id + "'");
    }
    if (pending.events.empty()) {
      warn("trace '" + *pending.case_id + "' has no usable events and was dropped");
      return;
    }
    try {
      traces_.emplace_back(std::move(*pending.case_id), std::move(pending.events), std::move(pending.attributes));
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
  }

  XML_Parser parser_;
  std::string log_name_;
  IngestReport report_;
  std::vector<Trace> traces_;
  std::optional<PendingTrace> trace_;
  std::optional<PendingEvent> event_;
  std::vector<std::string> attr_path_;
  std::size_t trace_index_ = 0;
  int ignored_depth_ = 0;
  std::optional<std::string> error_;
  std::size_t error_line_ = 0;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** atts) {
  static_cast<XesBuilder*>(user)->start(name, atts);
}

void XMLCALL on_end(void* user, const XML_Char* name) { static_cast<XesBuilder*>(user)->end(name); }

struct ParserHandle {
  XML_Parser parser = XML_ParserCreate("UTF-8");
  ~ParserHandle() { XML_ParserFree(parser); }
};

// XML attribute-value escaping.
std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string_view element_for(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::categorical: return "string";
    case AttributeKind::numeric: return "float";
    case AttributeKind::timestamp: return "date";
    case AttributeKind::boolean: return "boolean";
    case AttributeKind::integer: return "int";
  }
  return "string";
}

void write_attribute(std::ostream& out, std::string_view indent, std::string_view tag, std::string_view key,
                     std::string_view value) {
  out << indent << '<' << tag << " key=\"" << escape(key) << "\" value=\"" << escape(value) << "\"/>\n";
}

void write_attributes(std::ostream& out, std::string_view indent, const AttributeMap& attributes) {
  for (const auto& [name, value] : attributes) {
    write_attribute(out, indent, element_for(value.kind()), name, value.to_text());
  }
}

}  // namespace

IngestResult parse_xes(std::string_view document, std::string fallback_name) {
  ParserHandle handle;
  if (handle.parser == nullptr) throw IoError("cannot allocate XML parser");
  XesBuilder builder(handle.parser, std::move(fallback_name));
  XML_SetUserData(handle.parser, &builder);
  XML_SetElementHandler(handle.parser, on_start, on_end);

  constexpr std::size_t kChunk = 1 << 20;
  std::size_t offset = 0;
  do {
    const std::size_t n = std::min(kChunk, document.size() - offset);
    const bool last = offset + n == document.size();
    const auto status = XML_Parse(handle.parser, document.data() + offset, static_cast<int>(n), last);
    if (builder.error()) throw ParseError(*builder.error(), builder.error_line());
    if (status != XML_STATUS_OK) {
      throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(handle.parser)),
                       XML_GetCurrentLineNumber(handle.parser));
    }
    offset += n;
  } while (offset < document.size());
  return builder.finish();
}

namespace detail {

void write_xes(const EventLog& log, std::ostream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" ?>\n"
      << "<log xes.version=\"1.0\" xes.features=\"nested-attributes\" xmlns=\"http://www.xes-standard.org/\">\n"
      << "  <extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n"
      << "  <extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n";
  write_attribute(out, "  ", "string", kConceptName, log.name());
  for (const auto& trace : log.traces()) {
    out << "  <trace>\n";
    write_attribute(out, "    ", "string", kConceptName, trace.case_id());
    write_attributes(out, "    ", trace.attributes());
    for (const auto& event : trace.events()) {
      out << "    <event>\n";
      write_attribute(out, "      ", "string", kConceptName, event.activity);
      if (event.timestamp) write_attribute(out, "      ", "date", kTimestamp, format_iso8601(*event.timestamp));
      write_attributes(out, "      ", event.attributes);
      out << "    </event>\n";
    }
    out << "  </trace>\n";
  }
  out << "</log>\n";
}

}  // namespace detail
}  // namespace ppmaudit
