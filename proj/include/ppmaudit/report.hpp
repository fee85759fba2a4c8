#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppmaudit/audit.hpp"
#include "ppmaudit/baseline.hpp"
#include "ppmaudit/splitter.hpp"

namespace ppmaudit {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kReportFormatVersion = 1;

// "sha256:<hex>" of the raw bytes.
std::string fingerprint(std::string_view bytes);

struct AuditOptions {
  std::vector<std::uint64_t> seeds;  // one random split per seed
  bool temporal = false;
  bool self_split = false;  // train = test = whole log
  double test_fraction = 0.2;
  LimitReference limit_reference = LimitReference::test;
  unsigned workers = 1;  // splits processed concurrently
};

struct SplitResult {
  std::string label;  // "random-seed1", "temporal", "self"
  std::optional<SplitManifest> manifest;
  std::size_t train_traces = 0;
  std::size_t test_traces = 0;
  SplitAudit audit;
  std::optional<double> baseline_accuracy;  // absent when the test side has no samples
  std::map<PredictionRule, std::uint64_t> rule_usage;
  double elapsed_ms = 0.0;
};

// Splits in the order: random seeds as given, temporal, self. Throws
// InvalidArgument when the log (or a training side) yields no samples or no
// split was requested.
std::vector<SplitResult> run_audit(const EventLog& log, const AuditOptions& options);

struct LogProvenance {
  std::string name;
  std::string fingerprint;
  std::string source;  // path as given
};

// The "metrics" object of a report, canonical (sorted keys, compact).
std::string metrics_json(const SplitResult& result);

// Full report document: canonical JSON, two-space indent, LF terminated.
std::string report_json(const LogProvenance& log, const SplitResult& result);

// One row per split with the leakage / limit / baseline quantities.
std::string summary_csv(const LogProvenance& log, const std::vector<SplitResult>& results);

struct PlotTables {
  std::string leakage_by_log;     // one row per log: mean over its splits
  std::string accuracy_by_split;  // one row per report
};

// Throws InvalidArgument for unreadable or version-mismatched reports.
PlotTables plot_tables(const std::vector<std::string>& report_documents);

}  // namespace ppmaudit
