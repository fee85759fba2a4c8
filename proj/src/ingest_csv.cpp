#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "ingest_internal.hpp"
#include "ppmaudit/error.hpp"
#include "ppmaudit/ingest.hpp"

namespace ppmaudit {
namespace {

struct CsvRecord {
  std::size_t line = 0;  // line on which the record starts
  std::vector<std::string> fields;
};

// RFC 4180 style: quoted fields may hold delimiters, doubled quotes and line
// breaks. CRLF and LF line endings are both accepted.
class CsvReader {
 public:
  CsvReader(std::string_view text, char delimiter) : text_(text), delimiter_(delimiter) {
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;  // UTF-8 BOM
  }

  std::optional<CsvRecord> next() {
    while (pos_ < text_.size()) {
      CsvRecord record;
      record.line = line_;
      read_record(record.fields);
      if (record.fields.size() == 1 && record.fields[0].empty()) continue;  // blank line
      return record;
    }
    return std::nullopt;
  }

 private:
  void read_record(std::vector<std::string>& fields) {
    std::string field;
    bool quoted = false;
    bool field_started_quoted = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            field += '"';
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field += c;
        }
        continue;
      }
      if (c == '"' && field.empty() && !field_started_quoted) {
        quoted = true;
        field_started_quoted = true;
      } else if (c == delimiter_) {
        fields.push_back(std::move(field));
        field.clear();
        field_started_quoted = false;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        ++line_;
        break;
      } else {
        field += c;
      }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_);
    fields.push_back(std::move(field));
  }

  std::string_view text_;
  char delimiter_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::size_t require_column(const std::map<std::string, std::size_t>& header, const std::string& name) {
  const auto it = header.find(name);
  if (it == header.end()) throw ConfigError("mapped column '" + name + "' is not in the header");
  return it->second;
}

std::string quote_field(std::string_view value, char delimiter) {
  const bool needs_quotes = value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
  if (!needs_quotes) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct PendingCase {
  std::string case_id;
  std::vector<Event> events;
};

}  // namespace

void CsvMapping::validate() const {
  if (case_column == activity_column) throw ConfigError("case and activity columns must differ");
  if (timestamp_column && (*timestamp_column == case_column || *timestamp_column == activity_column)) {
    throw ConfigError("timestamp column overlaps the case or activity column");
  }
  std::set<std::string> seen;
  for (const auto& [name, kind] : attribute_columns) {
    if (name == case_column || name == activity_column || (timestamp_column && name == *timestamp_column)) {
      throw ConfigError("attribute column '" + name + "' overlaps a case/activity/timestamp column");
    }
    if (!seen.insert(name).second) throw ConfigError("attribute column '" + name + "' declared twice");
  }
}

IngestResult parse_csv(std::string_view document, const CsvMapping& mapping, std::string log_name) {
  mapping.validate();
  CsvReader reader(document, mapping.delimiter);
  const auto header_row = reader.next();
  if (!header_row) throw ConfigError("CSV input has no header row");

  std::map<std::string, std::size_t> header;
  for (std::size_t i = 0; i < header_row->fields.size(); ++i) header.emplace(header_row->fields[i], i);
  const std::size_t case_col = require_column(header, mapping.case_column);
  const std::size_t activity_col = require_column(header, mapping.activity_column);
  std::optional<std::size_t> ts_col;
  if (mapping.timestamp_column) ts_col = require_column(header, *mapping.timestamp_column);
  std::vector<std::pair<std::size_t, AttributeKind>> attr_cols;
  for (const auto& [name, kind] : mapping.attribute_columns) attr_cols.emplace_back(require_column(header, name), kind);
  const bool iso = mapping.timestamp_format == "iso8601";

  IngestReport report;
  auto warn = [&report](std::size_t line, std::string message) {
    report.warnings.push_back({"line " + std::to_string(line), std::move(message)});
  };

  std::vector<PendingCase> cases;
  std::map<std::string, std::size_t, std::less<>> case_slot;
  while (auto row = reader.next()) {
    auto& f = row->fields;
    auto cell = [&f](std::size_t i) -> std::string_view { return i < f.size() ? std::string_view(f[i]) : ""; };

    const auto case_id = cell(case_col);
    const auto activity = cell(activity_col);
    if (case_id.empty() || activity.empty()) {
      ++report.rows_skipped;
      warn(row->line, "row without case id or activity skipped");
      continue;
    }
    std::optional<Timestamp> ts;
    if (ts_col && !cell(*ts_col).empty()) {
      const auto text = cell(*ts_col);
      ts = iso ? parse_iso8601(text) : parse_timestamp(text, mapping.timestamp_format);
      if (!ts) {
        ++report.rows_skipped;
        warn(row->line, "unparseable timestamp '" + std::string(text) + "'; row skipped");
        continue;
      }
    }
    AttributeMap attributes;
    for (std::size_t a = 0; a < attr_cols.size(); ++a) {
      const auto& [col, kind] = attr_cols[a];
      const auto text = cell(col);
      if (text.empty()) continue;
      auto value = AttributeValue::from_text(kind, text);
      if (!value) {
        warn(row->line, "attribute '" + mapping.attribute_columns[a].first + "': cannot read '" + std::string(text) +
                            "' as " + std::string(to_string(kind)));
        continue;
      }
      attributes.emplace(mapping.attribute_columns[a].first, std::move(*value));
    }

    auto [it, inserted] = case_slot.try_emplace(std::string(case_id), cases.size());
    if (inserted) cases.push_back({std::string(case_id), {}});
    cases[it->second].events.emplace_back(std::string(activity), ts, std::move(attributes));
    ++report.events_read;
  }

  std::vector<Trace> traces;
  traces.reserve(cases.size());
  for (auto& c : cases) {
    const bool all_stamped =
        std::all_of(c.events.begin(), c.events.end(), [](const Event& e) { return e.timestamp.has_value(); });
    if (all_stamped) {
      std::stable_sort(c.events.begin(), c.events.end(),
                       [](const Event& a, const Event& b) { return *a.timestamp < *b.timestamp; });
    }
    try {
      traces.emplace_back(std::move(c.case_id), std::move(c.events));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what());
    }
  }
  report.traces_read = traces.size();
  return IngestResult{EventLog(std::move(log_name), std::move(traces)), std::move(report)};
}

CsvMapping csv_mapping_for(const EventLog& log) {
  CsvMapping mapping;
  bool any_timestamp = false;
  std::map<std::string, AttributeKind> kinds;
  for (const auto& t : log.traces()) {
    for (const auto& e : t.events()) {
      any_timestamp = any_timestamp || e.timestamp.has_value();
      for (const auto& [name, value] : e.attributes) kinds.emplace(name, value.kind());
    }
  }
  if (!any_timestamp) mapping.timestamp_column.reset();
  for (const auto& [name, kind] : kinds) mapping.attribute_columns.emplace_back(name, kind);
  return mapping;
}

namespace detail {

void write_csv(const EventLog& log, std::ostream& out) {
  const CsvMapping mapping = csv_mapping_for(log);
  const char d = mapping.delimiter;
  out << quote_field(mapping.case_column, d) << d << quote_field(mapping.activity_column, d);
  if (mapping.timestamp_column) out << d << quote_field(*mapping.timestamp_column, d);
  for (const auto& [name, kind] : mapping.attribute_columns) out << d << quote_field(name, d);
  out << '\n';
  for (const auto& t : log.traces()) {
    for (const auto& e : t.events()) {
      out << quote_field(t.case_id(), d) << d << quote_field(e.activity, d);
      if (mapping.timestamp_column) out << d << (e.timestamp ? format_iso8601(*e.timestamp) : std::string());
      for (const auto& [name, kind] : mapping.attribute_columns) {
        out << d;
        const auto it = e.attributes.find(name);
        if (it != e.attributes.end()) out << quote_field(it->second.to_text(), d);
      }
      out << '\n';
    }
  }
}

}  // namespace detail

void write_log(const EventLog& log, LogFormat format, std::ostream& sink) {
  if (format == LogFormat::xes) {
    detail::write_xes(log, sink);
  } else {
    detail::write_csv(log, sink);
  }
  sink.flush();
  if (!sink) throw IoError("failed to write event log");
}

}  // namespace ppmaudit
