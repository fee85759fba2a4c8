// ppmaudit: audit next-activity prediction setups on event logs.
//
//   ppmaudit audit --log helpdesk.xes.gz --seeds 1,2,3,4,5 --temporal --out out/
//   ppmaudit split --log log.xes --seed 7 --out manifest.json
//   ppmaudit baseline train --log train.xes --out model.json
//   ppmaudit baseline predict train.xes probes.jsonl predictions.jsonl
//   ppmaudit scenario generate --id all --out scenarios/
//   ppmaudit scenario score --id L1 --baseline --out scores/
//   ppmaudit plotdata out/report_*.json --out plots/

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "ppmaudit/audit.hpp"
#include "ppmaudit/baseline.hpp"
#include "ppmaudit/error.hpp"
#include "ppmaudit/ingest.hpp"
#include "ppmaudit/report.hpp"
#include "ppmaudit/scenarios.hpp"
#include "ppmaudit/splitter.hpp"

namespace fs = std::filesystem;
using namespace ppmaudit;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kIngest = 3, kProtocol = 4, kInternal = 5 };

struct LogArgs {
  std::string path;
  std::string format;  // "", "xes" or "csv"
  std::string csv_map;

  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--log", path, "Event log (.xes, .csv, optionally .gz)");
    if (required) opt->required();
    cmd->add_option("--format", format, "Log format when it cannot be told from the extension")
        ->check(CLI::IsMember({"xes", "csv"}));
    cmd->add_option("--csv-map", csv_map, "JSON file describing the CSV columns");
  }
};

struct LoadedLog {
  EventLog log;
  LogProvenance provenance;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

LoadedLog load(const LogArgs& args) {
  std::optional<LogFormat> format;
  if (args.format == "xes") format = LogFormat::xes;
  if (args.format == "csv") format = LogFormat::csv;
  CsvMapping mapping;
  if (!args.csv_map.empty()) mapping = csv_mapping_from_json(read_text(args.csv_map));

  const fs::path path(args.path);
  if (!format) format = detect_format(path);
  if (!format) throw ConfigError("cannot tell the format of '" + args.path + "'; use --format");
  const auto bytes = read_source_file(path);
  auto name = path.filename().string();
  for (const char* suffix : {".gz", ".xes", ".csv"}) {
    const std::string_view s(suffix);
    if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) name.resize(name.size() - s.size());
  }
  auto result = *format == LogFormat::xes ? parse_xes(bytes, name) : parse_csv(bytes, mapping, name);
  for (const auto& w : result.report.warnings) std::cerr << "warning: " << w.location << ": " << w.message << '\n';
  std::cerr << "read " << result.report.traces_read << " traces, " << result.report.events_read << " events";
  if (result.report.rows_skipped > 0) std::cerr << " (" << result.report.rows_skipped << " skipped)";
  std::cerr << '\n';
  // Fingerprint the uncompressed content so .xes and .xes.gz agree.
  return {std::move(result.log), {name, fingerprint(bytes), args.path}};
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

fs::path self_executable(const char* argv0) {
  std::error_code ec;
  const auto exe = fs::read_symlink("/proc/self/exe", ec);
  return ec ? fs::absolute(argv0) : exe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit next-activity prediction evaluation setups on event logs"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  // audit
  auto* audit = app.add_subcommand("audit", "Leakage, accuracy limit and baseline accuracy per train/test split");
  LogArgs audit_log;
  audit_log.attach(audit);
  std::vector<std::uint64_t> seeds;
  bool temporal = false;
  bool self_split = false;
  double test_fraction = 0.2;
  std::string limit_reference = "test";
  std::string audit_out;
  unsigned jobs = 1;
  audit->add_option("--seeds", seeds, "Random-split seeds (default 1,2,3,4,5 when no split is chosen)")
      ->delimiter(',');
  audit->add_flag("--temporal", temporal, "Add the split that tests on the most recently started cases");
  audit->add_flag("--self-split", self_split, "Add a split with train = test = the whole log");
  audit->add_option("--test-fraction", test_fraction, "Share of traces in the test set")
      ->check(CLI::Range(0.0, 1.0));
  audit->add_option("--limit-reference", limit_reference, "Where per-prefix label frequencies come from")
      ->check(CLI::IsMember({"test", "train"}));
  audit->add_option("--out", audit_out, "Output directory for reports and summary.csv")->required();
  audit->add_option("--jobs", jobs, "Splits processed concurrently")->check(CLI::Range(1u, 256u));

  // split
  auto* split = app.add_subcommand("split", "Write a train/test split manifest");
  LogArgs split_log;
  split_log.attach(split);
  std::optional<std::uint64_t> split_seed;
  bool split_temporal_flag = false;
  double split_fraction = 0.2;
  std::string split_out;
  std::string split_materialize;
  auto* seed_opt = split->add_option("--seed", split_seed, "Seed of a random split");
  auto* temporal_opt = split->add_flag("--temporal", split_temporal_flag, "Temporal split");
  seed_opt->excludes(temporal_opt);
  split->add_option("--test-fraction", split_fraction, "Share of traces in the test set")->check(CLI::Range(0.0, 1.0));
  split->add_option("--out", split_out, "Manifest path")->required();
  split->add_option("--materialize", split_materialize, "Also write train.xes and test.xes to this directory");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Naive prefix / bigram baseline predictor");
  baseline->require_subcommand(1);
  auto* b_train = baseline->add_subcommand("train", "Train on a log and write the model as JSON");
  LogArgs b_train_log;
  b_train_log.attach(b_train);
  std::string b_train_out;
  b_train->add_option("--out", b_train_out, "Model JSON path")->required();

  auto* b_dump = baseline->add_subcommand("dump", "Print a trained model as readable tables");
  std::string b_dump_model;
  b_dump->add_option("--model", b_dump_model, "Model JSON path")->required();

  auto* b_predict =
      baseline->add_subcommand("predict", "External-predictor entry point: TRAIN_LOG PROBES OUTPUT");
  std::string p_train;
  std::string p_probes;
  std::string p_out;
  std::string p_model;
  b_predict->add_option("train_log", p_train, "Training log (XES)")->required();
  b_predict->add_option("probes", p_probes, "Probe file (JSONL)")->required();
  b_predict->add_option("output", p_out, "Prediction file to write (JSONL)")->required();
  b_predict->add_option("--model", p_model, "Use this model instead of training on TRAIN_LOG");

  // scenario
  auto* scenario = app.add_subcommand("scenario", "Synthetic generalization scenarios L1-L6");
  scenario->require_subcommand(1);
  auto* s_gen = scenario->add_subcommand("generate", "Write training logs and probe files");
  auto* s_score = scenario->add_subcommand("score", "Run a predictor over the probes and score it");
  std::string s_id = "all";
  std::uint32_t replication = 1;
  std::string base_ts;
  std::string s_out;
  std::string s_cmd;
  bool s_baseline = false;
  long timeout_secs = 300;
  for (auto* cmd : {s_gen, s_score}) {
    cmd->add_option("--id", s_id, "Scenario (L1..L6, full name, or all)");
    cmd->add_option("--replication", replication, "Copies of each table row")->check(CLI::PositiveNumber);
    cmd->add_option("--out", s_out, "Output directory")->required();
  }
  s_gen->add_option("--base-timestamp", base_ts, "Stamp L1-L5 events starting at this ISO-8601 instant");
  auto* cmd_opt = s_score->add_option("--cmd", s_cmd, "Predictor command; receives TRAIN PROBES OUTPUT");
  auto* baseline_opt = s_score->add_flag("--baseline", s_baseline, "Score the built-in baseline via the protocol");
  cmd_opt->excludes(baseline_opt);
  s_score->add_option("--timeout-secs", timeout_secs, "Predictor timeout")->check(CLI::PositiveNumber);

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "Turn audit reports into leakage and accuracy tables");
  std::vector<std::string> reports;
  std::string plot_out;
  plot->add_option("reports", reports, "Report JSON files")->required();
  plot->add_option("--out", plot_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*audit) {
      if (seeds.empty() && !temporal && !self_split) seeds = {1, 2, 3, 4, 5};
      const auto loaded = load(audit_log);
      AuditOptions options;
      options.seeds = seeds;
      options.temporal = temporal;
      options.self_split = self_split;
      options.test_fraction = test_fraction;
      options.limit_reference = limit_reference == "train" ? LimitReference::train : LimitReference::test;
      options.workers = jobs;
      const auto results = run_audit(loaded.log, options);
      const fs::path out(audit_out);
      for (const auto& r : results) {
        write_text(out / ("report_" + r.label + ".json"), report_json(loaded.provenance, r));
        if (r.manifest) write_text(out / ("manifest_" + r.label + ".json"), manifest_to_json(*r.manifest));
      }
      write_text(out / "summary.csv", summary_csv(loaded.provenance, results));
      std::cout << "split               leakage%  unique%  limit    baseline\n";
      for (const auto& r : results) {
        std::printf("%-18s  %8s  %7s  %-7s  %s\n", r.label.c_str(), fixed(r.audit.leakage.leakage_pct, 2).c_str(),
                    fixed(r.audit.leakage.unique_leakage_pct, 2).c_str(),
                    fixed(r.audit.ambiguity.accuracy_limit, 4).c_str(),
                    r.baseline_accuracy ? fixed(*r.baseline_accuracy, 4).c_str() : "n/a");
      }
    } else if (*split) {
      if (!split_seed && !split_temporal_flag) throw InvalidArgument("choose --seed or --temporal");
      const auto loaded = load(split_log);
      const auto manifest = split_temporal_flag ? split_temporal(loaded.log, split_fraction)
                                                : split_random(loaded.log, split_fraction, *split_seed);
      write_text(split_out, manifest_to_json(manifest));
      if (!split_materialize.empty()) {
        const auto [train, test] = materialize(loaded.log, manifest);
        for (const auto& [log, file] : {std::pair{&train, "train.xes"}, std::pair{&test, "test.xes"}}) {
          std::ostringstream xes;
          write_log(*log, LogFormat::xes, xes);
          write_text(fs::path(split_materialize) / file, xes.str());
        }
      }
      std::cout << manifest.train_case_ids.size() << " train / " << manifest.test_case_ids.size() << " test traces\n";
    } else if (*b_train) {
      const auto loaded = load(b_train_log);
      const auto model = train_baseline(loaded.log);
      write_text(b_train_out, model_to_json(model));
      std::cout << model.n_samples << " samples, " << model.n_unique_keys << " unique prefixes, "
                << model.bigram_table.size() << " bigram entries\n";
    } else if (*b_dump) {
      const auto model = model_from_json(read_text(b_dump_model));
      std::cout << "global majority: " << model.global_majority << "\n\nbigram table:\n";
      for (const auto& [activity, label] : model.bigram_table) std::cout << "  " << activity << " -> " << label << '\n';
      std::cout << "\nprefix table (" << model.prefix_table.size() << " keys):\n";
      for (const auto& [key, label] : model.prefix_table) std::cout << "  " << to_string(key) << " -> " << label << '\n';
    } else if (*b_predict) {
      BaselineModel model;
      if (p_model.empty()) {
        model = train_baseline(parse_xes(read_source_file(p_train), "train").log);
      } else {
        model = model_from_json(read_text(p_model));
      }
      std::ifstream probe_in(p_probes, std::ios::binary);
      if (!probe_in) throw IoError("cannot open '" + p_probes + "'");
      std::map<std::string, std::string> predictions;
      for (const auto& probe : import_probes(probe_in)) {
        predictions[probe.probe_id] = predict(model, probe.prefix).activity;
      }
      std::ostringstream out;
      write_predictions(predictions, out);
      write_text(p_out, out.str());
    } else if (*s_gen || *s_score) {
      std::vector<ScenarioId> ids;
      if (s_id == "all") {
        ids.assign(std::begin(kAllScenarios), std::end(kAllScenarios));
      } else if (const auto id = scenario_from_string(s_id)) {
        ids.push_back(*id);
      } else {
        throw InvalidArgument("unknown scenario '" + s_id + "'");
      }
      std::optional<Timestamp> base;
      if (!base_ts.empty()) {
        base = parse_iso8601(base_ts);
        if (!base) throw InvalidArgument("invalid --base-timestamp '" + base_ts + "'");
      }
      if (*s_score && s_cmd.empty() && !s_baseline) throw InvalidArgument("choose --cmd or --baseline");

      for (const auto id : ids) {
        const auto generated = generate(id, replication, base);
        const fs::path dir = fs::path(s_out) / std::string(to_string(id));
        if (*s_gen) {
          std::ostringstream xes, csv, probes;
          write_log(generated.training_log, LogFormat::xes, xes);
          write_log(generated.training_log, LogFormat::csv, csv);
          export_probes(generated, probes);
          write_text(dir / "train.xes", xes.str());
          write_text(dir / "train.csv", csv.str());
          write_text(dir / "train.csv-map.json", csv_mapping_to_json(csv_mapping_for(generated.training_log)));
          write_text(dir / "probes.jsonl", probes.str());
          write_text(dir / "transcription.txt", transcribe(generated.training_log));
          nlohmann::ordered_json meta;
          meta["scenario"] = std::string(to_string(id));
          meta["replication"] = replication;
          meta["probes"] = generated.probes.size();
          meta["notes"] = generated.notes;
          write_text(dir / "scenario.json", meta.dump(2) + "\n");
          std::cout << to_string(id) << ": " << generated.training_log.size() << " traces, "
                    << generated.probes.size() << " probes -> " << dir.string() << '\n';
        } else {
          ExternalPredictor predictor;
          if (s_baseline) {
            predictor.argv = {self_executable(argv[0]).string(), "baseline", "predict"};
          } else {
            predictor.argv = {"/bin/sh", "-c", s_cmd + " \"$@\"", "ppmaudit-predictor"};
          }
          predictor.timeout = std::chrono::seconds(timeout_secs);
          predictor.work_dir = dir / "work";
          const auto card = run_external_predictor(generated, predictor);
          write_text(dir / "scorecard.json", scorecard_to_json(card));
          std::size_t satisfied = 0;
          for (const auto& v : card.verdicts) satisfied += v.satisfied ? 1 : 0;
          std::cout << to_string(id) << ": " << satisfied << "/" << card.verdicts.size() << " probes satisfied\n";
        }
      }
    } else if (*plot) {
      std::vector<std::string> docs;
      for (const auto& r : reports) docs.push_back(read_text(r));
      const auto tables = plot_tables(docs);
      write_text(fs::path(plot_out) / "leakage_by_log.csv", tables.leakage_by_log);
      write_text(fs::path(plot_out) / "accuracy_by_split.csv", tables.accuracy_by_split);
    }
  } catch (const ExecutionError& e) {
    std::cerr << "error: " << e.what() << '\n' << e.diagnostics() << '\n';
    return kProtocol;
  } catch (const ProtocolError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kProtocol;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIngest;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIngest;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIngest;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InconsistencyError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
