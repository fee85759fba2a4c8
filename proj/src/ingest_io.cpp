#include <zlib.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "ppmaudit/error.hpp"
#include "ppmaudit/ingest.hpp"
#include "json.hpp"

namespace ppmaudit {
namespace {

bool has_gzip_magic(std::string_view bytes) {
  return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
         static_cast<unsigned char>(bytes[1]) == 0x8b;
}

std::string gunzip(std::string_view compressed) {
  z_stream zs{};
  // 16 + MAX_WBITS: expect a gzip wrapper.
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw IoError("zlib initialisation failed");
  std::string out;
  char buffer[1 << 16];
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  int rc = Z_OK;
  while (true) {
    zs.next_out = reinterpret_cast<Bytef*>(buffer);
    zs.avail_out = sizeof buffer;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw ParseError("corrupt gzip stream");
    }
    out.append(buffer, sizeof buffer - zs.avail_out);
    if (rc == Z_STREAM_END) {
      // Concatenated gzip members are legal; keep going if input remains.
      if (zs.avail_in == 0) break;
      inflateReset(&zs);
    } else if (zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw ParseError("truncated gzip stream");
    }
  }
  inflateEnd(&zs);
  return out;
}

std::string lower_extension_chain(const std::filesystem::path& path) {
  std::string name = path.filename().string();
  for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return name;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string read_source(std::istream& source) {
  std::string bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  if (source.bad()) throw IoError("failed to read input stream");
  return has_gzip_magic(bytes) ? gunzip(bytes) : bytes;
}

std::string read_source_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_source(in);
}

IngestResult parse_xes(std::istream& source, std::string fallback_name) {
  return parse_xes(read_source(source), std::move(fallback_name));
}

IngestResult parse_csv(std::istream& source, const CsvMapping& mapping, std::string log_name) {
  return parse_csv(read_source(source), mapping, std::move(log_name));
}

std::optional<LogFormat> detect_format(const std::filesystem::path& path) {
  const auto name = lower_extension_chain(path);
  if (ends_with(name, ".xes") || ends_with(name, ".xes.gz")) return LogFormat::xes;
  if (ends_with(name, ".csv") || ends_with(name, ".csv.gz")) return LogFormat::csv;
  return std::nullopt;
}

IngestResult load_log(const std::filesystem::path& path, std::optional<LogFormat> format, const CsvMapping& mapping) {
  if (!format) format = detect_format(path);
  if (!format) throw ConfigError("cannot infer log format of '" + path.string() + "'; pass it explicitly");
  auto stem = path.filename().string();
  for (const auto* suffix : {".gz", ".xes", ".csv"}) {
    if (ends_with(stem, suffix)) stem.resize(stem.size() - std::string_view(suffix).size());
  }
  const auto bytes = read_source_file(path);
  return *format == LogFormat::xes ? parse_xes(bytes, stem) : parse_csv(bytes, mapping, stem);
}

CsvMapping csv_mapping_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("csv mapping is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("csv mapping must be a JSON object");
  CsvMapping m;
  try {
    if (j.contains("case_column")) m.case_column = j.at("case_column").get<std::string>();
    if (j.contains("activity_column")) m.activity_column = j.at("activity_column").get<std::string>();
    if (j.contains("timestamp_column")) {
      const auto& tc = j.at("timestamp_column");
      m.timestamp_column = tc.is_null() ? std::nullopt : std::optional<std::string>(tc.get<std::string>());
    }
    if (j.contains("timestamp_format")) m.timestamp_format = j.at("timestamp_format").get<std::string>();
    if (j.contains("delimiter")) {
      const auto d = j.at("delimiter").get<std::string>();
      if (d.size() != 1) throw ConfigError("delimiter must be a single character");
      m.delimiter = d[0];
    }
    if (j.contains("attribute_columns")) {
      for (const auto& col : j.at("attribute_columns")) {
        const auto kind_name = col.at("kind").get<std::string>();
        const auto kind = attribute_kind_from_string(kind_name);
        if (!kind) throw ConfigError("unknown attribute kind '" + kind_name + "'");
        m.attribute_columns.emplace_back(col.at("column").get<std::string>(), *kind);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed csv mapping: ") + e.what());
  }
  m.validate();
  return m;
}

std::string csv_mapping_to_json(const CsvMapping& m) {
  nlohmann::ordered_json j;
  j["case_column"] = m.case_column;
  j["activity_column"] = m.activity_column;
  j["timestamp_column"] = m.timestamp_column ? nlohmann::ordered_json(*m.timestamp_column) : nullptr;
  j["timestamp_format"] = m.timestamp_format;
  auto cols = nlohmann::ordered_json::array();
  for (const auto& [name, kind] : m.attribute_columns) {
    nlohmann::ordered_json c;
    c["column"] = name;
    c["kind"] = std::string(to_string(kind));
    cols.push_back(std::move(c));
  }
  j["attribute_columns"] = std::move(cols);
  j["delimiter"] = std::string(1, m.delimiter);
  return j.dump(2) + "\n";
}

}  // namespace ppmaudit
