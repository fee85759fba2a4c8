#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppmaudit/audit.hpp"
#include "ppmaudit/model.hpp"

namespace ppmaudit {

enum class PredictionRule { prefix_lookup, bigram_fallback, global_fallback };

std::string_view to_string(PredictionRule rule);

// Most-common-next-activity lookup per training prefix, falling back to the
// most common successor of the last activity, then to the overall most
// common label. Every majority breaks ties by the smallest label (byte order).
struct BaselineModel {
  std::map<ControlFlowKey, std::string> prefix_table;
  std::map<std::string, std::string> bigram_table;
  std::string global_majority;
  std::uint64_t n_samples = 0;
  std::uint64_t n_unique_keys = 0;

  friend bool operator==(const BaselineModel&, const BaselineModel&) = default;
};

// Smallest label among those with the maximum count. `counts` must be non-empty.
const std::string& majority_label(const LabelCounts& counts);

// Throws InvalidArgument if the log yields no prefix samples.
BaselineModel train_baseline(const EventLog& train);
BaselineModel train_baseline(std::span<const PrefixSample> samples);

struct Prediction {
  std::string activity;
  PredictionRule rule;
};

// Throws InvalidArgument for an empty prefix.
Prediction predict(const BaselineModel& model, std::span<const Event> prefix);

struct PredictionRecord {
  PrefixSample sample;
  std::string predicted;
  PredictionRule rule;
  bool correct;
};

struct Evaluation {
  double accuracy = 0.0;
  std::vector<PredictionRecord> records;
  std::map<PredictionRule, std::uint64_t> rule_usage;  // all three rules present
};

// Throws InvalidArgument if the test log yields no prefix samples.
Evaluation evaluate(const BaselineModel& model, const EventLog& test);
Evaluation evaluate(const BaselineModel& model, std::span<const PrefixSample> test_samples);

// {"prefix_table": [[[...key], label], ...], "bigram_table": [[activity, label], ...],
//  "global_majority": label, "training_stats": {"n_samples": n, "n_unique_keys": k}}
std::string model_to_json(const BaselineModel& model);
BaselineModel model_from_json(std::string_view text);

}  // namespace ppmaudit
