#include "ppmaudit/baseline.hpp"

#include "json.hpp"
#include "ppmaudit/error.hpp"

namespace ppmaudit {

std::string_view to_string(PredictionRule rule) {
  switch (rule) {
    case PredictionRule::prefix_lookup: return "prefix_lookup";
    case PredictionRule::bigram_fallback: return "bigram_fallback";
    case PredictionRule::global_fallback: return "global_fallback";
  }
  return "unknown";
}

const std::string& majority_label(const LabelCounts& counts) {
  if (counts.empty()) throw InvalidArgument("majority of an empty count table");
  // std::map iterates labels in byte order; keep the first maximum.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

BaselineModel train_baseline(const EventLog& train) {
  const auto samples = enumerate_log_samples(train);
  if (samples.empty()) {
    throw InvalidArgument("training log '" + train.name() + "' yields no prefix samples (all traces have length 1)");
  }
  return train_baseline(samples);
}

BaselineModel train_baseline(std::span<const PrefixSample> samples) {
  if (samples.empty()) throw InvalidArgument("baseline needs at least one training sample");
  const PrefixIndex index = build_index(samples);

  std::map<std::string, LabelCounts> successors;
  LabelCounts labels;
  for (const auto& s : samples) {
    ++successors[s.prefix().back().activity][s.label()];
    ++labels[s.label()];
  }

  BaselineModel model;
  index.for_each([&model](const ControlFlowKey& key, const LabelCounts& counts) {
    model.prefix_table.emplace(key, majority_label(counts));
  });
  for (const auto& [activity, counts] : successors) model.bigram_table.emplace(activity, majority_label(counts));
  model.global_majority = majority_label(labels);
  model.n_samples = samples.size();
  model.n_unique_keys = index.key_count();
  return model;
}

Prediction predict(const BaselineModel& model, std::span<const Event> prefix) {
  const auto key = control_flow_key(prefix);
  if (const auto it = model.prefix_table.find(key); it != model.prefix_table.end()) {
    return {it->second, PredictionRule::prefix_lookup};
  }
  if (const auto it = model.bigram_table.find(prefix.back().activity); it != model.bigram_table.end()) {
    return {it->second, PredictionRule::bigram_fallback};
  }
  return {model.global_majority, PredictionRule::global_fallback};
}

Evaluation evaluate(const BaselineModel& model, const EventLog& test) {
  const auto samples = enumerate_log_samples(test);
  if (samples.empty()) throw InvalidArgument("test log '" + test.name() + "' yields no prefix samples");
  return evaluate(model, samples);
}

Evaluation evaluate(const BaselineModel& model, std::span<const PrefixSample> test_samples) {
  if (test_samples.empty()) throw InvalidArgument("evaluation needs at least one test sample");
  Evaluation out;
  out.rule_usage = {{PredictionRule::prefix_lookup, 0}, {PredictionRule::bigram_fallback, 0},
                    {PredictionRule::global_fallback, 0}};
  std::uint64_t correct = 0;
  out.records.reserve(test_samples.size());
  for (const auto& s : test_samples) {
    auto p = predict(model, s.prefix());
    const bool hit = p.activity == s.label();
    correct += hit ? 1 : 0;
    ++out.rule_usage[p.rule];
    out.records.push_back({s, std::move(p.activity), p.rule, hit});
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(test_samples.size());
  return out;
}

std::string model_to_json(const BaselineModel& model) {
  nlohmann::ordered_json j;
  auto prefix = nlohmann::ordered_json::array();
  for (const auto& [key, label] : model.prefix_table) prefix.push_back(nlohmann::ordered_json::array({key.activities(), label}));
  auto bigram = nlohmann::ordered_json::array();
  for (const auto& [activity, label] : model.bigram_table) bigram.push_back(nlohmann::ordered_json::array({activity, label}));
  j["prefix_table"] = std::move(prefix);
  j["bigram_table"] = std::move(bigram);
  j["global_majority"] = model.global_majority;
  j["training_stats"] = {{"n_samples", model.n_samples}, {"n_unique_keys", model.n_unique_keys}};
  return j.dump() + "\n";
}

BaselineModel model_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    BaselineModel model;
    for (const auto& row : j.at("prefix_table")) {
      model.prefix_table.emplace(ControlFlowKey(row.at(0).get<std::vector<std::string>>()),
                                 row.at(1).get<std::string>());
    }
    for (const auto& row : j.at("bigram_table")) {
      model.bigram_table.emplace(row.at(0).get<std::string>(), row.at(1).get<std::string>());
    }
    model.global_majority = j.at("global_majority").get<std::string>();
    if (model.global_majority.empty()) throw ParseError("model has an empty global majority");
    if (j.contains("training_stats")) {
      model.n_samples = j.at("training_stats").at("n_samples").get<std::uint64_t>();
      model.n_unique_keys = j.at("training_stats").at("n_unique_keys").get<std::uint64_t>();
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed baseline model: ") + e.what());
  }
}

}  // namespace ppmaudit
