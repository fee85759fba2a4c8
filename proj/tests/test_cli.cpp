#include <gtest/gtest.h>
#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ppmaudit/ingest.hpp"
#include "ppmaudit/splitter.hpp"
#include "support/random_logs.hpp"

namespace fs = std::filesystem;
using namespace ppmaudit;
using namespace ppmaudit::testing;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ppmaudit-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  int run(const std::string& args) {
    const std::string cmd = std::string("'") + PPMAUDIT_CLI + "' " + args + " >'" + (dir_ / "out.txt").string() +
                            "' 2>'" + (dir_ / "err.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  }

  fs::path write_log_file(const EventLog& log, const std::string& name) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    write_log(log, LogFormat::xes, out);
    return path;
  }

  std::string q(const fs::path& p) const { return "'" + p.string() + "'"; }

  fs::path dir_;
};

EventLog stamped_log() {
  std::mt19937_64 rng(99);
  auto log = random_log(rng, {.max_activities = 5, .max_traces = 40, .timestamps = true}, "cli-log");
  while (log.size() < 10) log = random_log(rng, {.max_activities = 5, .max_traces = 40, .timestamps = true}, "cli-log");
  return log;
}

std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_F(Cli, AuditSixSplits) {
  const auto log = write_log_file(stamped_log(), "log.xes");
  ASSERT_EQ(run("audit --log " + q(log) + " --seeds 1,2,3,4,5 --temporal --out " + q(dir_ / "out")), 0)
      << read(dir_ / "err.txt");
  std::size_t reports = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "out")) {
    if (e.path().filename().string().rfind("report_", 0) == 0) ++reports;
  }
  EXPECT_EQ(reports, 6u);
  EXPECT_EQ(lines(read(dir_ / "out" / "summary.csv")), 7u);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "manifest_temporal.json"));
  const auto manifest = read(dir_ / "out" / "manifest_random-seed3.json");
  EXPECT_EQ(manifest_to_json(manifest_from_json(manifest)), manifest);

  ASSERT_EQ(run("plotdata " + q(dir_ / "out") + "/report_*.json --out " + q(dir_ / "plots")), 0)
      << read(dir_ / "err.txt");
  EXPECT_EQ(lines(read(dir_ / "plots" / "leakage_by_log.csv")), 2u);
  EXPECT_EQ(lines(read(dir_ / "plots" / "accuracy_by_split.csv")), 7u);
}

TEST_F(Cli, SelfSplitLeaksEverything) {
  const auto log = write_log_file(stamped_log(), "log.xes");
  ASSERT_EQ(run("audit --log " + q(log) + " --self-split --out " + q(dir_ / "out")), 0) << read(dir_ / "err.txt");
  const auto doc = nlohmann::json::parse(read(dir_ / "out" / "report_self.json"));
  EXPECT_EQ(doc["metrics"]["leakage_pct"], 100.0);
}

TEST_F(Cli, ExitCodes) {
  const auto singles = write_log_file(log_of({{"A"}, {"B"}, {"C"}}), "singles.xes");
  EXPECT_EQ(run("audit --log " + q(singles) + " --out " + q(dir_ / "a")), 2);
  EXPECT_NE(read(dir_ / "err.txt").find("zero prefix samples"), std::string::npos);

  EXPECT_EQ(run("audit --out " + q(dir_ / "a")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("audit --log " + q(dir_ / "missing.xes") + " --out " + q(dir_ / "a")), 3);

  std::ofstream(dir_ / "broken.xes") << "<log><trace>\n</log>\n";
  EXPECT_EQ(run("audit --log " + q(dir_ / "broken.xes") + " --out " + q(dir_ / "a")), 3);

  std::ofstream(dir_ / "report.json") << R"({"report_format_version": 999})";
  EXPECT_EQ(run("plotdata " + q(dir_ / "report.json") + " --out " + q(dir_ / "p")), 2);
}

TEST_F(Cli, SplitAndMaterialize) {
  const auto log = write_log_file(stamped_log(), "log.xes");
  ASSERT_EQ(run("split --log " + q(log) + " --seed 4 --out " + q(dir_ / "m.json") + " --materialize " +
                q(dir_ / "parts")),
            0)
      << read(dir_ / "err.txt");
  const auto m = manifest_from_json(read(dir_ / "m.json"));
  EXPECT_EQ(m.spec.seed, 4u);
  const auto train = load_log(dir_ / "parts" / "train.xes").log;
  const auto test = load_log(dir_ / "parts" / "test.xes").log;
  EXPECT_EQ(train.size(), m.train_case_ids.size());
  EXPECT_EQ(test.size(), m.test_case_ids.size());
  EXPECT_EQ(run("split --log " + q(log) + " --seed 4 --temporal --out " + q(dir_ / "x.json")), 2);
}

TEST_F(Cli, ScenarioGenerateAll) {
  ASSERT_EQ(run("scenario generate --id all --out " + q(dir_ / "sc")), 0) << read(dir_ / "err.txt");
  std::size_t dirs = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "sc")) {
    ASSERT_TRUE(e.is_directory());
    EXPECT_TRUE(fs::exists(e.path() / "train.xes"));
    EXPECT_TRUE(fs::exists(e.path() / "probes.jsonl"));
    ++dirs;
  }
  EXPECT_EQ(dirs, 6u);
  const auto csv = load_log(dir_ / "sc" / "L5_cost" / "train.csv", LogFormat::csv,
                            csv_mapping_from_json(read(dir_ / "sc" / "L5_cost" / "train.csv-map.json")))
                       .log;
  const auto xes = load_log(dir_ / "sc" / "L5_cost" / "train.xes").log;
  ASSERT_EQ(csv.size(), xes.size());
  for (std::size_t i = 0; i < csv.size(); ++i) EXPECT_EQ(csv.traces()[i], xes.traces()[i]);
}

TEST_F(Cli, ScenarioScoreWithCommand) {
  const std::string cmd = std::string("'") + PPMAUDIT_CLI + "' baseline predict";
  ASSERT_EQ(run("scenario score --id L1 --cmd \"" + cmd + "\" --out " + q(dir_ / "sc")), 0) << read(dir_ / "err.txt");
  const auto card = read(dir_ / "sc" / "L1_concurrency" / "scorecard.json");
  EXPECT_EQ(card, read(PPMAUDIT_GOLDEN_DIR "/scorecards/L1.json"));
}

TEST_F(Cli, ScenarioScoreTimeout) {
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(run("scenario score --id L3 --cmd 'sleep 30;:' --timeout-secs 1 --out " + q(dir_ / "sc")), 4);
  EXPECT_GE(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(900));
  EXPECT_NE(read(dir_ / "err.txt").find("timed out"), std::string::npos) << read(dir_ / "err.txt");
}

TEST_F(Cli, BaselineTrainDumpPredict) {
  const auto log = write_log_file(log_of({{"A", "B", "C"}, {"A", "B", "C"}, {"A", "B", "D"}}), "small.xes");
  ASSERT_EQ(run("baseline train --log " + q(log) + " --out " + q(dir_ / "model.json")), 0) << read(dir_ / "err.txt");
  ASSERT_EQ(run("baseline dump --model " + q(dir_ / "model.json")), 0);
  EXPECT_NE(read(dir_ / "out.txt").find("<A,B>"), std::string::npos);
  std::ofstream(dir_ / "probes.jsonl")
      << R"({"probe_id":"p","scenario":"x","prefix":[{"activity":"X","attributes":{}},{"activity":"B","attributes":{}}],"expectation":{"kind":"single","labels":["C"]},"generalization_type":"unseen_control_flow"})"
      << "\n";
  ASSERT_EQ(run("baseline predict " + q(log) + " " + q(dir_ / "probes.jsonl") + " " + q(dir_ / "pred.jsonl") +
                " --model " + q(dir_ / "model.json")),
            0)
      << read(dir_ / "err.txt");
  EXPECT_EQ(read(dir_ / "pred.jsonl"), "{\"probe_id\":\"p\",\"prediction\":\"C\"}\n");
}
