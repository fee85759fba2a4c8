#include <gtest/gtest.h>

#include "json.hpp"
#include "ppmaudit/error.hpp"
#include "ppmaudit/report.hpp"
#include "support/random_logs.hpp"

using namespace ppmaudit;
using namespace ppmaudit::testing;

namespace {

EventLog stamped_log(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto log = random_log(rng, {.max_activities = 5, .max_traces = 60, .timestamps = true}, "stamped");
  while (log.size() < 10) log = random_log(rng, {.max_activities = 5, .max_traces = 60, .timestamps = true}, "stamped");
  return log;
}

std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST(Fingerprint, Sha256) {
  EXPECT_EQ(fingerprint("abc"), "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(RunAudit, SixSplitsInOrder) {
  AuditOptions options;
  options.seeds = {1, 2, 3, 4, 5};
  options.temporal = true;
  const auto results = run_audit(stamped_log(1), options);
  ASSERT_EQ(results.size(), 6u);
  EXPECT_EQ(results[0].label, "random-seed1");
  EXPECT_EQ(results[5].label, "temporal");
  for (const auto& r : results) {
    ASSERT_TRUE(r.manifest);
    EXPECT_EQ(r.train_traces + r.test_traces, stamped_log(1).size());
    EXPECT_EQ(r.rule_usage.size(), 3u);
  }
}

TEST(RunAudit, SelfSplit) {
  AuditOptions options;
  options.self_split = true;
  const auto log = stamped_log(2);
  const auto r = run_audit(log, options).at(0);
  EXPECT_EQ(r.label, "self");
  EXPECT_FALSE(r.manifest);
  EXPECT_EQ(r.audit.leakage.leakage_pct, 100.0);
  ASSERT_TRUE(r.baseline_accuracy);
  EXPECT_NEAR(*r.baseline_accuracy, r.audit.ambiguity.accuracy_limit, 1e-12);
}

TEST(RunAudit, Errors) {
  AuditOptions options;
  options.seeds = {1};
  EXPECT_THROW(run_audit(log_of({{"A"}, {"B"}, {"C"}}), options), InvalidArgument);
  EXPECT_THROW(run_audit(stamped_log(3), AuditOptions{}), InvalidArgument);
}

TEST(RunAudit, WorkersDoNotChangeMetrics) {
  AuditOptions options;
  options.seeds = {1, 2, 3, 4, 5};
  options.temporal = true;
  const auto log = stamped_log(4);
  const auto serial = run_audit(log, options);
  options.workers = 4;
  const auto parallel = run_audit(log, options);
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(metrics_json(serial[i]), metrics_json(parallel[i]));
}

TEST(Reports, DocumentShape) {
  AuditOptions options;
  options.seeds = {7};
  const auto r = run_audit(stamped_log(5), options).at(0);
  const LogProvenance prov{"stamped", fingerprint("x"), "stamped.xes"};
  const auto doc = nlohmann::json::parse(report_json(prov, r));
  EXPECT_EQ(doc["report_format_version"], kReportFormatVersion);
  EXPECT_EQ(doc["tool_version"], std::string(kToolVersion));
  EXPECT_EQ(doc["split"]["method"], "random");
  EXPECT_EQ(doc["split"]["manifest"]["seed"], 7);
  for (const char* key : {"train_samples", "test_samples", "leakage_pct", "unique_leakage_pct", "accuracy_limit",
                          "ambiguous_sample_pct", "baseline_accuracy", "baseline_rule_usage"}) {
    EXPECT_TRUE(doc["metrics"].contains(key)) << key;
  }
  EXPECT_EQ(nlohmann::json::parse(metrics_json(r)), doc["metrics"]);

  const auto csv = summary_csv(prov, {r, r});
  EXPECT_EQ(lines(csv), 3u);
  EXPECT_EQ(csv.substr(0, csv.find(',')), "log");
}

TEST(PlotTables, Aggregation) {
  AuditOptions options;
  options.seeds = {1, 2, 3, 4, 5};
  options.temporal = true;
  const auto results = run_audit(stamped_log(6), options);
  const LogProvenance prov{"stamped", fingerprint("y"), "stamped.xes"};
  std::vector<std::string> docs;
  double sum = 0;
  for (const auto& r : results) {
    docs.push_back(report_json(prov, r));
    sum += r.audit.leakage.leakage_pct;
  }
  const auto tables = plot_tables(docs);
  EXPECT_EQ(lines(tables.leakage_by_log), 2u);
  EXPECT_EQ(lines(tables.accuracy_by_split), 7u);
  const auto row = tables.leakage_by_log.substr(tables.leakage_by_log.find('\n') + 1);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  ASSERT_GE(cells.size(), 4u);
  EXPECT_EQ(cells[2], "6");
  EXPECT_NEAR(std::stod(cells[3]), sum / 6.0, 1e-9);

  const auto single = plot_tables({docs[0]});
  EXPECT_EQ(lines(single.leakage_by_log), 2u);
  EXPECT_EQ(lines(single.accuracy_by_split), 2u);
}

TEST(PlotTables, RejectsOtherVersions) {
  AuditOptions options;
  options.self_split = true;
  auto doc = nlohmann::json::parse(report_json({"l", "f", "s"}, run_audit(stamped_log(7), options).at(0)));
  doc["report_format_version"] = kReportFormatVersion + 1;
  EXPECT_THROW(plot_tables({doc.dump()}), InvalidArgument);
  EXPECT_THROW(plot_tables({"not json"}), InvalidArgument);
  EXPECT_THROW(plot_tables({}), InvalidArgument);
}
