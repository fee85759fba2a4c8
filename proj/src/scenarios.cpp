#include "ppmaudit/scenarios.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "ppmaudit/error.hpp"
#include "ppmaudit/ingest.hpp"
#include "subprocess.hpp"

namespace ppmaudit {
namespace {

using Json = nlohmann::ordered_json;

// A table cell: activity plus the scenario's single context value, if any.
struct Cell {
  std::string activity;
  std::optional<AttributeValue> attribute;
  std::optional<Timestamp> timestamp;
};

using Row = std::vector<Cell>;

Row plain(std::initializer_list<const char*> activities) {
  Row row;
  for (const auto* a : activities) row.push_back({a, std::nullopt, std::nullopt});
  return row;
}

Cell res(const char* activity, const char* resource) {
  return {activity, AttributeValue::categorical(resource), std::nullopt};
}

Cell euro(const char* activity, double cost) { return {activity, AttributeValue::numeric(cost), std::nullopt}; }

Cell dated(const char* activity, int year, unsigned month) { return {activity, std::nullopt, month_start(year, month)}; }

std::string_view attribute_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::L4_resources: return "resource";
    case ScenarioId::L5_cost: return "cost";
    default: return "";
  }
}

std::vector<Row> table_rows(ScenarioId id) {
  switch (id) {
    case ScenarioId::L1_concurrency:
      return {plain({"A", "B", "C1", "C2", "C3", "D", "E"}), plain({"A", "B", "C2", "C1", "C3", "D", "E"}),
              plain({"A", "B", "C2", "C3", "C1", "D", "E"}), plain({"A", "B", "C3", "C1", "C2", "D", "E"}),
              plain({"A", "B", "C3", "C2", "C1", "D", "E"})};
    case ScenarioId::L2_concurrency_ambiguity:
      return {plain({"A", "B", "C", "D", "E", "F", "G", "H"}), plain({"A", "B", "C", "F", "D", "G", "E", "H"}),
              plain({"A", "B", "C", "D", "F", "E", "G", "H"}), plain({"A", "B", "F", "C", "D", "G", "H", "E"})};
    case ScenarioId::L3_loops:
      return {plain({"A", "B", "C", "D"}), plain({"A", "B", "B", "C", "D"})};
    case ScenarioId::L4_resources:
      return {{res("A", "R1"), res("B", "R100"), res("C", "R2")},
              {res("A", "R1"), res("B", "R101"), res("C", "R2")},
              {res("A", "R1"), res("B", "R101"), res("C", "R2")}};
    case ScenarioId::L5_cost:
      return {{euro("A", 2), euro("B", 2), euro("C", 2)},
              {euro("A", 499), euro("B", 499), euro("C", 499)},
              {euro("A", 501), euro("B", 501), euro("D", 501)}};
    case ScenarioId::L6_drift:
      return {{dated("A", 2022, 5), dated("B", 2022, 6), dated("C", 2022, 6)},
              {dated("A", 2022, 7), dated("B", 2022, 7), dated("C", 2022, 7)},
              {dated("A", 2023, 4), dated("B", 2023, 5), dated("D", 2023, 5)}};
  }
  return {};
}

struct ProbeSpec {
  Row prefix;
  ExpectationKind kind;
  std::set<std::string> labels;
  GeneralizationType type;
};

std::vector<ProbeSpec> probe_specs(ScenarioId id) {
  using EK = ExpectationKind;
  using GT = GeneralizationType;
  switch (id) {
    case ScenarioId::L1_concurrency:
      return {{plain({"A", "B", "C1", "C3", "C2", "D"}), EK::single, {"E"}, GT::unseen_control_flow},
              {plain({"A", "B", "C1", "C3", "C2"}), EK::single, {"D"}, GT::unseen_control_flow}};
    case ScenarioId::L2_concurrency_ambiguity:
      return {{plain({"A", "B", "C", "D", "F", "G"}), EK::any_of, {"E", "H"}, GT::unseen_control_flow}};
    case ScenarioId::L3_loops:
      return {{plain({"A", "B", "B", "B", "C"}), EK::single, {"D"}, GT::unseen_control_flow}};
    case ScenarioId::L4_resources:
      return {{{res("A", "R1"), res("B", "R1")}, EK::single, {"C"}, GT::unseen_attribute_combination},
              {{res("A", "R1"), res("F", "R100")}, EK::unknown_or, {"C"}, GT::unseen_attribute_value},
              {{res("A", "R1"), res("B", "R37")}, EK::unknown_or, {"C"}, GT::unseen_attribute_value}};
    case ScenarioId::L5_cost:
      return {{{euro("A", 2), euro("B", 499)}, EK::single, {"C"}, GT::unseen_attribute_combination},
              {{euro("A", 200), euro("B", 200)}, EK::single, {"C"}, GT::unseen_attribute_value}};
    case ScenarioId::L6_drift:
      return {{{dated("A", 2022, 7), dated("B", 2023, 5)}, EK::single, {"D"}, GT::unseen_attribute_combination},
              {{dated("A", 2024, 6), dated("B", 2024, 6)}, EK::single, {"D"}, GT::unseen_attribute_value}};
  }
  return {};
}

std::vector<Event> to_events(ScenarioId id, const Row& row, std::optional<Timestamp> first_stamp) {
  std::vector<Event> events;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const auto& cell = row[i];
    AttributeMap attributes;
    if (cell.attribute) attributes.emplace(std::string(attribute_name(id)), *cell.attribute);
    auto ts = cell.timestamp;
    if (!ts && first_stamp) ts = *first_stamp + std::chrono::hours(static_cast<int>(i));
    events.emplace_back(cell.activity, ts, std::move(attributes));
  }
  return events;
}

bool uses_context(ScenarioId id) {
  return id == ScenarioId::L4_resources || id == ScenarioId::L5_cost || id == ScenarioId::L6_drift;
}

Json attributes_to_json(const AttributeMap& attributes) {
  Json out = Json::object();
  for (const auto& [name, value] : attributes) {
    switch (value.kind()) {
      case AttributeKind::categorical: out[name] = value.as_categorical(); break;
      case AttributeKind::numeric: out[name] = value.as_numeric(); break;
      case AttributeKind::integer: out[name] = value.as_integer(); break;
      case AttributeKind::boolean: out[name] = value.as_boolean(); break;
      case AttributeKind::timestamp: out[name] = Json{{"timestamp", format_iso8601(value.as_timestamp())}}; break;
    }
  }
  return out;
}

AttributeMap attributes_from_json(const nlohmann::json& j) {
  AttributeMap out;
  for (const auto& [name, v] : j.items()) {
    if (v.is_string()) {
      out.emplace(name, AttributeValue::categorical(v.get<std::string>()));
    } else if (v.is_boolean()) {
      out.emplace(name, AttributeValue::boolean(v.get<bool>()));
    } else if (v.is_number_integer()) {
      out.emplace(name, AttributeValue::integer(v.get<std::int64_t>()));
    } else if (v.is_number_float()) {
      out.emplace(name, AttributeValue::numeric(v.get<double>()));
    } else if (v.is_object() && v.contains("timestamp")) {
      const auto ts = parse_iso8601(v.at("timestamp").get<std::string>());
      if (!ts) throw ParseError("attribute '" + name + "' has an invalid timestamp");
      out.emplace(name, AttributeValue::timestamp(*ts));
    } else {
      throw ParseError("attribute '" + name + "' has an unsupported JSON type");
    }
  }
  return out;
}

template <typename Enum, std::size_t N>
std::optional<Enum> enum_from(std::string_view name, const Enum (&values)[N]) {
  for (auto v : values) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

constexpr ExpectationKind kKinds[] = {ExpectationKind::single, ExpectationKind::any_of, ExpectationKind::unknown_or};
constexpr GeneralizationType kTypes[] = {GeneralizationType::unseen_control_flow,
                                         GeneralizationType::unseen_attribute_combination,
                                         GeneralizationType::unseen_attribute_value};

std::string render_event(const Event& e) {
  if (!e.timestamp && e.attributes.empty()) return e.activity;
  std::string out = "(" + e.activity;
  if (e.timestamp) out += ", " + format_iso8601(*e.timestamp);
  for (const auto& [name, value] : e.attributes) out += ", " + name + "=" + value.to_text();
  return out + ")";
}

}  // namespace

std::string_view to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::L1_concurrency: return "L1_concurrency";
    case ScenarioId::L2_concurrency_ambiguity: return "L2_concurrency_ambiguity";
    case ScenarioId::L3_loops: return "L3_loops";
    case ScenarioId::L4_resources: return "L4_resources";
    case ScenarioId::L5_cost: return "L5_cost";
    case ScenarioId::L6_drift: return "L6_drift";
  }
  return "unknown";
}

std::string_view short_name(ScenarioId id) { return to_string(id).substr(0, 2); }

std::optional<ScenarioId> scenario_from_string(std::string_view name) {
  for (auto id : kAllScenarios) {
    if (to_string(id) == name || short_name(id) == name) return id;
  }
  return std::nullopt;
}

std::string_view to_string(ExpectationKind kind) {
  switch (kind) {
    case ExpectationKind::single: return "single";
    case ExpectationKind::any_of: return "any_of";
    case ExpectationKind::unknown_or: return "unknown_or";
  }
  return "unknown";
}

std::string_view to_string(GeneralizationType type) {
  switch (type) {
    case GeneralizationType::unseen_control_flow: return "unseen_control_flow";
    case GeneralizationType::unseen_attribute_combination: return "unseen_attribute_combination";
    case GeneralizationType::unseen_attribute_value: return "unseen_attribute_value";
  }
  return "unknown";
}

bool Expectation::accepts(std::string_view prediction) const {
  if (kind == ExpectationKind::unknown_or && prediction == kUnknownToken) return true;
  return labels.count(std::string(prediction)) != 0;
}

bool probe_is_unseen(const GeneratedScenario& scenario, const ScenarioProbe& probe) {
  const bool context = uses_context(scenario.id);
  for (const auto& trace : scenario.training_log.traces()) {
    const auto events = trace.events();
    if (events.size() <= probe.prefix.size()) continue;  // only proper prefixes are samples
    bool same = true;
    for (std::size_t i = 0; i < probe.prefix.size() && same; ++i) {
      same = context ? events[i] == probe.prefix[i] : events[i].activity == probe.prefix[i].activity;
    }
    if (same) return false;
  }
  return true;
}

GeneratedScenario generate(ScenarioId id, std::uint32_t replication, std::optional<Timestamp> base_timestamp) {
  if (replication < 1) throw InvalidArgument("replication must be at least 1");
  const bool stamp = base_timestamp.has_value() && id != ScenarioId::L6_drift;

  std::vector<Trace> traces;
  const auto rows = table_rows(id);
  std::size_t case_index = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::uint32_t copy = 1; copy <= replication; ++copy, ++case_index) {
      std::optional<Timestamp> first;
      if (stamp) first = *base_timestamp + std::chrono::days(static_cast<int>(case_index));
      traces.emplace_back("t" + std::to_string(r + 1) + "_" + std::to_string(copy), to_events(id, rows[r], first));
    }
  }

  GeneratedScenario scenario{id, EventLog(std::string(to_string(id)), std::move(traces)), {}, replication, {}};
  const auto specs = probe_specs(id);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    scenario.probes.push_back({std::string(short_name(id)) + "-p" + std::to_string(i + 1), std::string(to_string(id)),
                               to_events(id, spec.prefix, std::nullopt), Expectation{spec.kind, spec.labels},
                               spec.type});
  }
  for (const auto& probe : scenario.probes) {
    for (const auto& label : probe.expectation.labels) {
      if (scenario.training_log.activity_alphabet().count(label) == 0) {
        throw std::logic_error("probe " + probe.probe_id + " expects label outside the alphabet");
      }
    }
    if (!probe_is_unseen(scenario, probe)) {
      throw std::logic_error("probe " + probe.probe_id + " occurs among the training prefixes");
    }
  }

  scenario.notes.push_back(
      "Expected predictions are assumed plausible continuations for unseen prefixes, not labels observed in data.");
  if (id == ScenarioId::L2_concurrency_ambiguity) {
    scenario.notes.push_back(
        "L2-p1 accepts E or H: these are exactly the activities that directly follow G in the training traces "
        "(H three times, E once). D never follows G in this log.");
  }
  if (id == ScenarioId::L4_resources) {
    scenario.notes.push_back(
        "L4-p2/L4-p3 accept the __UNKNOWN__ token or C, the activity observed at position 3 in every trace.");
  }
  return scenario;
}

void export_probes(const GeneratedScenario& scenario, std::ostream& sink) {
  for (const auto& probe : scenario.probes) {
    Json j;
    j["probe_id"] = probe.probe_id;
    j["scenario"] = probe.scenario;
    auto prefix = Json::array();
    for (const auto& e : probe.prefix) {
      Json event;
      event["activity"] = e.activity;
      event["attributes"] = attributes_to_json(e.attributes);
      if (e.timestamp) event["timestamp"] = format_iso8601(*e.timestamp);
      prefix.push_back(std::move(event));
    }
    j["prefix"] = std::move(prefix);
    j["expectation"] = {{"kind", std::string(to_string(probe.expectation.kind))},
                        {"labels", Json(std::vector<std::string>(probe.expectation.labels.begin(),
                                                                 probe.expectation.labels.end()))}};
    j["generalization_type"] = std::string(to_string(probe.generalization_type));
    sink << j.dump() << '\n';
  }
  if (!sink) throw IoError("failed to write probe file");
}

std::vector<ScenarioProbe> import_probes(std::istream& source) {
  std::vector<ScenarioProbe> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ScenarioProbe probe;
      probe.probe_id = j.at("probe_id").get<std::string>();
      probe.scenario = j.at("scenario").get<std::string>();
      for (const auto& e : j.at("prefix")) {
        std::optional<Timestamp> ts;
        if (e.contains("timestamp")) {
          ts = parse_iso8601(e.at("timestamp").get<std::string>());
          if (!ts) throw ParseError("invalid timestamp", line_no);
        }
        AttributeMap attributes;
        if (e.contains("attributes")) attributes = attributes_from_json(e.at("attributes"));
        probe.prefix.emplace_back(e.at("activity").get<std::string>(), ts, std::move(attributes));
      }
      const auto& ex = j.at("expectation");
      const auto kind = enum_from(ex.at("kind").get<std::string>(), kKinds);
      if (!kind) throw ParseError("unknown expectation kind", line_no);
      probe.expectation.kind = *kind;
      for (const auto& l : ex.at("labels")) probe.expectation.labels.insert(l.get<std::string>());
      const auto type = enum_from(j.at("generalization_type").get<std::string>(), kTypes);
      if (!type) throw ParseError("unknown generalization type", line_no);
      probe.generalization_type = *type;
      out.push_back(std::move(probe));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed probe: ") + e.what(), line_no);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

std::string transcribe(const EventLog& log) {
  std::string out;
  for (const auto& t : log.traces()) {
    out += t.case_id() + ":";
    for (const auto& e : t.events()) out += " " + render_event(e);
    out += '\n';
  }
  return out;
}

ScoreCard score(const GeneratedScenario& scenario, const std::map<std::string, std::string>& predictions) {
  std::vector<std::string> missing;
  std::vector<std::string> unknown;
  std::set<std::string> ids;
  for (const auto& p : scenario.probes) {
    ids.insert(p.probe_id);
    if (predictions.count(p.probe_id) == 0) missing.push_back(p.probe_id);
  }
  for (const auto& [id, prediction] : predictions) {
    if (ids.count(id) == 0) unknown.push_back(id);
  }
  if (!missing.empty() || !unknown.empty()) {
    std::string message = "prediction set does not match the probes of " + std::string(to_string(scenario.id));
    auto list = [&message](const char* what, const std::vector<std::string>& items) {
      if (items.empty()) return;
      message += std::string("; ") + what + ":";
      for (const auto& i : items) message += " " + i;
    };
    list("missing", missing);
    list("unknown", unknown);
    throw ProtocolError(message);
  }

  ScoreCard card;
  card.scenario = std::string(to_string(scenario.id));
  std::map<GeneralizationType, std::pair<std::size_t, std::size_t>> per_type;
  std::size_t satisfied = 0;
  for (const auto& p : scenario.probes) {
    const auto& prediction = predictions.at(p.probe_id);
    const bool ok = p.expectation.accepts(prediction);
    card.verdicts.push_back({p.probe_id, prediction, ok, p.expectation.kind, p.generalization_type});
    auto& [hit, total] = per_type[p.generalization_type];
    hit += ok ? 1 : 0;
    ++total;
    satisfied += ok ? 1 : 0;
  }
  for (const auto& [type, counts] : per_type) {
    card.type_rates[type] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  card.overall_rate =
      scenario.probes.empty() ? 0.0 : static_cast<double>(satisfied) / static_cast<double>(scenario.probes.size());
  return card;
}

std::string scorecard_to_json(const ScoreCard& card) {
  Json j;
  j["scenario"] = card.scenario;
  std::size_t satisfied = 0;
  auto probes = Json::array();
  for (const auto& v : card.verdicts) {
    satisfied += v.satisfied ? 1 : 0;
    Json p;
    p["probe_id"] = v.probe_id;
    p["prediction"] = v.prediction;
    p["satisfied"] = v.satisfied;
    p["expectation_kind"] = std::string(to_string(v.kind));
    p["generalization_type"] = std::string(to_string(v.generalization_type));
    probes.push_back(std::move(p));
  }
  j["probes_total"] = card.verdicts.size();
  j["probes_satisfied"] = satisfied;
  j["overall_rate"] = card.overall_rate;
  Json rates = Json::object();
  for (const auto& [type, rate] : card.type_rates) rates[std::string(to_string(type))] = rate;
  j["type_rates"] = std::move(rates);
  j["probes"] = std::move(probes);
  return j.dump(2) + "\n";
}

std::map<std::string, std::string> parse_predictions(std::istream& source) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id;
    std::string prediction;
    try {
      const auto j = nlohmann::json::parse(line);
      id = j.at("probe_id").get<std::string>();
      prediction = j.at("prediction").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError("prediction file line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!out.emplace(id, std::move(prediction)).second) {
      throw ProtocolError("prediction file line " + std::to_string(line_no) + ": duplicate probe id '" + id + "'");
    }
  }
  return out;
}

void write_predictions(const std::map<std::string, std::string>& predictions, std::ostream& sink) {
  for (const auto& [id, prediction] : predictions) {
    Json j;
    j["probe_id"] = id;
    j["prediction"] = prediction;
    sink << j.dump() << '\n';
  }
  if (!sink) throw IoError("failed to write predictions");
}

ScoreCard run_external_predictor(const GeneratedScenario& scenario, const ExternalPredictor& predictor) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(predictor.work_dir, ec);
  if (ec) throw IoError("cannot create work directory '" + predictor.work_dir.string() + "': " + ec.message());

  const auto train_path = predictor.work_dir / "train.xes";
  const auto probe_path = predictor.work_dir / "probes.jsonl";
  const auto output_path = predictor.work_dir / "predictions.jsonl";
  const auto stdout_path = predictor.work_dir / "stdout.txt";
  const auto stderr_path = predictor.work_dir / "stderr.txt";
  {
    std::ofstream train(train_path, std::ios::binary);
    if (!train) throw IoError("cannot write '" + train_path.string() + "'");
    write_log(scenario.training_log, LogFormat::xes, train);
    std::ofstream probes(probe_path, std::ios::binary);
    if (!probes) throw IoError("cannot write '" + probe_path.string() + "'");
    export_probes(scenario, probes);
  }
  fs::remove(output_path, ec);

  auto argv = predictor.argv;
  argv.push_back(train_path.string());
  argv.push_back(probe_path.string());
  argv.push_back(output_path.string());
  const auto outcome = detail::run_process(argv, stdout_path, stderr_path,
                                           std::chrono::duration_cast<std::chrono::milliseconds>(predictor.timeout));
  auto diagnostics = [&] {
    return "stderr:\n" + detail::tail_of(stderr_path) + "\nstdout:\n" + detail::tail_of(stdout_path);
  };
  if (outcome.timed_out) {
    throw ExecutionError("predictor timed out after " + std::to_string(predictor.timeout.count()) + " s", diagnostics());
  }
  if (outcome.signaled) {
    throw ExecutionError("predictor killed by signal " + std::to_string(outcome.signal), diagnostics());
  }
  if (outcome.exit_code != 0) {
    throw ExecutionError("predictor exited with status " + std::to_string(outcome.exit_code), diagnostics());
  }

  std::ifstream in(output_path, std::ios::binary);
  if (!in) throw ProtocolError("predictor did not write '" + output_path.string() + "'");
  return score(scenario, parse_predictions(in));
}

}  // namespace ppmaudit
