#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ppmaudit/model.hpp"

namespace ppmaudit {

enum class ScenarioId {
  L1_concurrency,
  L2_concurrency_ambiguity,
  L3_loops,
  L4_resources,
  L5_cost,
  L6_drift,
};

inline constexpr ScenarioId kAllScenarios[] = {ScenarioId::L1_concurrency, ScenarioId::L2_concurrency_ambiguity,
                                               ScenarioId::L3_loops,       ScenarioId::L4_resources,
                                               ScenarioId::L5_cost,        ScenarioId::L6_drift};

std::string_view to_string(ScenarioId id);
std::string_view short_name(ScenarioId id);  // "L1" ... "L6"
// Accepts the full name ("L3_loops") or the short one ("L3").
std::optional<ScenarioId> scenario_from_string(std::string_view name);

// Reserved prediction meaning "no evidence for any continuation".
inline constexpr std::string_view kUnknownToken = "__UNKNOWN__";

enum class ExpectationKind { single, any_of, unknown_or };
enum class GeneralizationType { unseen_control_flow, unseen_attribute_combination, unseen_attribute_value };

std::string_view to_string(ExpectationKind kind);
std::string_view to_string(GeneralizationType type);

struct Expectation {
  ExpectationKind kind;
  std::set<std::string> labels;

  bool accepts(std::string_view prediction) const;

  friend bool operator==(const Expectation&, const Expectation&) = default;
};

struct ScenarioProbe {
  std::string probe_id;
  std::string scenario;  // full scenario name
  std::vector<Event> prefix;
  Expectation expectation;
  GeneralizationType generalization_type;

  friend bool operator==(const ScenarioProbe&, const ScenarioProbe&) = default;
};

struct GeneratedScenario {
  ScenarioId id;
  EventLog training_log;
  std::vector<ScenarioProbe> probes;
  std::uint32_t replication = 1;
  std::vector<std::string> notes;
};

// Builds one scenario log with every table row repeated `replication` times
// (case ids "t<row>_<copy>"). L4 events carry a categorical "resource", L5 a
// numeric "cost" in Euro, L6 month-start UTC timestamps. When
// `base_timestamp` is given, L1-L5 events are stamped one hour apart from it,
// one day per case. Throws InvalidArgument for replication < 1.
GeneratedScenario generate(ScenarioId id, std::uint32_t replication = 1,
                           std::optional<Timestamp> base_timestamp = std::nullopt);

// Training-sample equality used to prove a probe is unseen: control-flow for
// L1-L3, activity + attributes + timestamp for L4-L6.
bool probe_is_unseen(const GeneratedScenario& scenario, const ScenarioProbe& probe);

// One JSON object per line, keys in the order probe_id, scenario, prefix,
// expectation, generalization_type.
void export_probes(const GeneratedScenario& scenario, std::ostream& sink);
std::vector<ScenarioProbe> import_probes(std::istream& source);

// Canonical text transcription of the training log, one line per trace:
// "t1_1: A B C1" or "t1_1: (A, resource=R1) (B, resource=R100)".
std::string transcribe(const EventLog& log);

struct ProbeVerdict {
  std::string probe_id;
  std::string prediction;
  bool satisfied;
  ExpectationKind kind;
  GeneralizationType generalization_type;
};

struct ScoreCard {
  std::string scenario;
  std::vector<ProbeVerdict> verdicts;  // probe order
  std::map<GeneralizationType, double> type_rates;
  double overall_rate = 0.0;
};

// Throws ProtocolError listing missing or unknown probe ids.
ScoreCard score(const GeneratedScenario& scenario, const std::map<std::string, std::string>& predictions);

std::string scorecard_to_json(const ScoreCard& card);

// {"probe_id": ..., "prediction": ...} per line. Throws ProtocolError on
// malformed lines or duplicate probe ids.
std::map<std::string, std::string> parse_predictions(std::istream& source);
void write_predictions(const std::map<std::string, std::string>& predictions, std::ostream& sink);

struct ExternalPredictor {
  // Program and leading arguments; the training-log, probe-file and output
  // paths are appended as the last three arguments.
  std::vector<std::string> argv;
  std::chrono::seconds timeout{300};
  // Created if missing. Receives train.xes, probes.jsonl, predictions.jsonl,
  // stdout.txt and stderr.txt.
  std::filesystem::path work_dir;
};

// Throws ExecutionError (nonzero exit, signal, timeout) or ProtocolError
// (missing, malformed or incomplete prediction file).
ScoreCard run_external_predictor(const GeneratedScenario& scenario, const ExternalPredictor& predictor);

}  // namespace ppmaudit
