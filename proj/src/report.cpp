#include "ppmaudit/report.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <future>
#include <sstream>

#include "json.hpp"
#include "ppmaudit/error.hpp"

namespace ppmaudit {
namespace {

using Json = nlohmann::json;

std::string number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string csv_cell(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

struct SplitPlan {
  std::string label;
  std::optional<std::uint64_t> seed;
  bool temporal = false;
  bool self = false;
};

SplitResult run_split(const EventLog& log, const SplitPlan& plan, const AuditOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SplitResult result;
  result.label = plan.label;

  EventLog train;
  EventLog test;
  if (plan.self) {
    train = log;
    test = log;
  } else {
    result.manifest =
        plan.temporal ? split_temporal(log, options.test_fraction) : split_random(log, options.test_fraction, *plan.seed);
    std::tie(train, test) = materialize(log, *result.manifest);
  }
  result.train_traces = train.size();
  result.test_traces = test.size();

  const auto train_samples = enumerate_log_samples(train);
  const auto test_samples = enumerate_log_samples(test);
  if (train_samples.empty()) {
    throw InvalidArgument("split '" + plan.label + "': training side yields no prefix samples");
  }
  const auto train_index = build_index(train_samples);
  result.audit.train_samples = train_samples.size();
  result.audit.test_samples = test_samples.size();
  result.audit.leakage = compute_leakage(train_index, test_samples);
  result.audit.ambiguity = options.limit_reference == LimitReference::train
                               ? compute_accuracy_limit(train_index, test_samples, LimitReference::train)
                               : compute_accuracy_limit(build_index(test_samples), test_samples, LimitReference::test);

  result.rule_usage = {{PredictionRule::prefix_lookup, 0}, {PredictionRule::bigram_fallback, 0},
                       {PredictionRule::global_fallback, 0}};
  if (!test_samples.empty()) {
    const auto model = train_baseline(train_samples);
    const auto evaluation = evaluate(model, test_samples);
    result.baseline_accuracy = evaluation.accuracy;
    result.rule_usage = evaluation.rule_usage;
  }
  result.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

Json metrics_object(const SplitResult& r) {
  Json m;
  m["train_samples"] = r.audit.train_samples;
  m["test_samples"] = r.audit.test_samples;
  m["test_empty"] = r.audit.leakage.empty;
  m["leaked_samples"] = r.audit.leakage.test_samples_leaked;
  m["leakage_pct"] = r.audit.leakage.leakage_pct;
  m["unique_test_keys"] = r.audit.leakage.unique_test_keys_total;
  m["unique_leaked_keys"] = r.audit.leakage.unique_test_keys_leaked;
  m["unique_leakage_pct"] = r.audit.leakage.unique_leakage_pct;
  m["accuracy_limit"] = r.audit.ambiguity.accuracy_limit;
  m["accuracy_limit_reference"] = std::string(to_string(r.audit.ambiguity.reference));
  m["ambiguous_sample_pct"] = r.audit.ambiguity.ambiguous_sample_pct;
  m["baseline_accuracy"] = r.baseline_accuracy ? Json(*r.baseline_accuracy) : Json(nullptr);
  Json usage = Json::object();
  for (const auto& [rule, n] : r.rule_usage) usage[std::string(to_string(rule))] = n;
  m["baseline_rule_usage"] = std::move(usage);
  return m;
}

}  // namespace

std::string fingerprint(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::vector<SplitResult> run_audit(const EventLog& log, const AuditOptions& options) {
  if (count_log_samples(log) == 0) {
    throw InvalidArgument("log '" + log.name() + "' yields zero prefix samples: every trace has length 1");
  }
  std::vector<SplitPlan> plans;
  for (auto seed : options.seeds) plans.push_back({"random-seed" + std::to_string(seed), seed, false, false});
  if (options.temporal) plans.push_back({"temporal", std::nullopt, true, false});
  if (options.self_split) plans.push_back({"self", std::nullopt, false, true});
  if (plans.empty()) throw InvalidArgument("no split requested");

  std::vector<SplitResult> results(plans.size());
  const std::size_t workers = std::max(1u, options.workers);
  for (std::size_t begin = 0; begin < plans.size(); begin += workers) {
    std::vector<std::future<SplitResult>> batch;
    const std::size_t end = std::min(plans.size(), begin + workers);
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                 [&log, &options, plan = plans[i]] { return run_split(log, plan, options); }));
    }
    for (std::size_t i = begin; i < end; ++i) results[i] = batch[i - begin].get();
  }
  return results;
}

std::string metrics_json(const SplitResult& result) { return metrics_object(result).dump(); }

std::string report_json(const LogProvenance& log, const SplitResult& result) {
  Json doc;
  doc["report_format_version"] = kReportFormatVersion;
  doc["tool_version"] = std::string(kToolVersion);
  doc["log"] = {{"name", log.name}, {"fingerprint", log.fingerprint}, {"source", log.source}};
  Json split;
  split["label"] = result.label;
  split["train_traces"] = result.train_traces;
  split["test_traces"] = result.test_traces;
  if (result.manifest) {
    split["method"] = std::string(to_string(result.manifest->spec.method));
    split["manifest"] = Json::parse(manifest_to_json(*result.manifest));
  } else {
    split["method"] = "self";
    split["manifest"] = nullptr;
  }
  doc["split"] = std::move(split);
  doc["metrics"] = metrics_object(result);
  doc["timing"] = {{"elapsed_ms", result.elapsed_ms}};
  return doc.dump(2) + "\n";
}

std::string summary_csv(const LogProvenance& log, const std::vector<SplitResult>& results) {
  std::ostringstream out;
  out << "log,split,method,seed,train_traces,test_traces,train_samples,test_samples,leakage_pct,"
         "unique_leakage_pct,accuracy_limit,ambiguous_sample_pct,baseline_accuracy,prefix_lookup,bigram_fallback,"
         "global_fallback\n";
  for (const auto& r : results) {
    const std::string method = r.manifest ? std::string(to_string(r.manifest->spec.method)) : "self";
    const std::string seed = r.manifest && r.manifest->spec.seed ? std::to_string(*r.manifest->spec.seed) : "";
    out << csv_cell(log.name) << ',' << csv_cell(r.label) << ',' << method << ',' << seed << ',' << r.train_traces
        << ',' << r.test_traces << ',' << r.audit.train_samples << ',' << r.audit.test_samples << ','
        << number(r.audit.leakage.leakage_pct) << ',' << number(r.audit.leakage.unique_leakage_pct) << ','
        << number(r.audit.ambiguity.accuracy_limit) << ',' << number(r.audit.ambiguity.ambiguous_sample_pct) << ','
        << (r.baseline_accuracy ? number(*r.baseline_accuracy) : "") << ','
        << r.rule_usage.at(PredictionRule::prefix_lookup) << ',' << r.rule_usage.at(PredictionRule::bigram_fallback)
        << ',' << r.rule_usage.at(PredictionRule::global_fallback) << '\n';
  }
  return out.str();
}

PlotTables plot_tables(const std::vector<std::string>& report_documents) {
  if (report_documents.empty()) throw InvalidArgument("plotdata needs at least one report");

  struct LogGroup {
    std::string name;
    std::string fingerprint;
    double leakage_sum = 0;
    double unique_sum = 0;
    std::size_t splits = 0;
  };
  std::vector<LogGroup> groups;
  std::ostringstream fig2;
  fig2 << "log,fingerprint,split,leakage_pct,baseline_accuracy,accuracy_limit\n";

  for (std::size_t i = 0; i < report_documents.size(); ++i) {
    Json doc;
    try {
      doc = Json::parse(report_documents[i]);
    } catch (const Json::exception& e) {
      throw InvalidArgument("report " + std::to_string(i + 1) + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("report_format_version") ||
        doc.at("report_format_version") != kReportFormatVersion) {
      throw InvalidArgument("report " + std::to_string(i + 1) + " has an incompatible report_format_version (expected " +
                            std::to_string(kReportFormatVersion) + ")");
    }
    try {
      const auto name = doc.at("log").at("name").get<std::string>();
      const auto fp = doc.at("log").at("fingerprint").get<std::string>();
      const auto& m = doc.at("metrics");
      const double leakage = m.at("leakage_pct").get<double>();
      auto it = std::find_if(groups.begin(), groups.end(), [&](const LogGroup& g) { return g.fingerprint == fp; });
      if (it == groups.end()) it = groups.insert(groups.end(), LogGroup{name, fp});
      it->leakage_sum += leakage;
      it->unique_sum += m.at("unique_leakage_pct").get<double>();
      ++it->splits;
      fig2 << csv_cell(name) << ',' << fp << ',' << csv_cell(doc.at("split").at("label").get<std::string>()) << ','
           << number(leakage) << ','
           << (m.at("baseline_accuracy").is_null() ? "" : number(m.at("baseline_accuracy").get<double>())) << ','
           << number(m.at("accuracy_limit").get<double>()) << '\n';
    } catch (const Json::exception& e) {
      throw InvalidArgument("report " + std::to_string(i + 1) + " lacks required fields: " + e.what());
    }
  }

  std::ostringstream fig1;
  fig1 << "log,fingerprint,splits,mean_leakage_pct,mean_unique_leakage_pct\n";
  for (const auto& g : groups) {
    const auto n = static_cast<double>(g.splits);
    fig1 << csv_cell(g.name) << ',' << g.fingerprint << ',' << g.splits << ',' << number(g.leakage_sum / n) << ','
         << number(g.unique_sum / n) << '\n';
  }
  return {fig1.str(), fig2.str()};
}

}  // namespace ppmaudit
