#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppmaudit/model.hpp"

namespace ppmaudit {

// Column layout of a delimited event file.
struct CsvMapping {
  std::string case_column = "case:concept:name";
  std::string activity_column = "concept:name";
  std::optional<std::string> timestamp_column = "time:timestamp";
  // "iso8601" or a strptime format such as "%Y/%m/%d %H:%M:%S".
  std::string timestamp_format = "iso8601";
  std::vector<std::pair<std::string, AttributeKind>> attribute_columns;
  char delimiter = ',';

  // Throws ConfigError if the column roles overlap.
  void validate() const;
};

CsvMapping csv_mapping_from_json(std::string_view json_text);
std::string csv_mapping_to_json(const CsvMapping& mapping);

struct IngestWarning {
  std::string location;  // "line 12", "trace 3", ...
  std::string message;
};

struct IngestReport {
  std::size_t traces_read = 0;
  std::size_t events_read = 0;
  std::size_t rows_skipped = 0;
  std::vector<IngestWarning> warnings;
};

struct IngestResult {
  EventLog log;
  IngestReport report;
};

enum class LogFormat { xes, csv };

// Reads the whole stream, inflating it first when it carries a gzip header.
std::string read_source(std::istream& source);
std::string read_source_file(const std::filesystem::path& path);

// `fallback_name` names the log when the document has no concept:name.
IngestResult parse_xes(std::string_view document, std::string fallback_name = "log");
IngestResult parse_xes(std::istream& source, std::string fallback_name = "log");

IngestResult parse_csv(std::string_view document, const CsvMapping& mapping, std::string log_name = "log");
IngestResult parse_csv(std::istream& source, const CsvMapping& mapping, std::string log_name = "log");

// The CSV writer emits case/activity/timestamp columns followed by every event
// attribute name in the log, sorted. This mapping reads such a file back.
CsvMapping csv_mapping_for(const EventLog& log);

void write_log(const EventLog& log, LogFormat format, std::ostream& sink);

// Format from the extension (".xes", ".xes.gz", ".csv", ".csv.gz").
std::optional<LogFormat> detect_format(const std::filesystem::path& path);

// Reads a log file in the given format (detected when absent). CSV needs a
// mapping; the default one matches what write_log produces.
IngestResult load_log(const std::filesystem::path& path, std::optional<LogFormat> format = std::nullopt,
                      const CsvMapping& mapping = {});

}  // namespace ppmaudit
