#include "ppmaudit/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "json.hpp"
#include "ppmaudit/error.hpp"

namespace ppmaudit {
namespace {

constexpr std::string_view kTestSizeRule = "max(1, floor(test_fraction * traces))";

void check_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) throw InvalidArgument("test fraction must lie strictly between 0 and 1");
}

void check_trace_count(const EventLog& log) {
  if (log.size() < 2) throw InvalidArgument("splitting needs at least 2 traces, log has " + std::to_string(log.size()));
}

// Uniform integer in [0, bound] drawn by rejection, so the result does not
// depend on any standard library distribution implementation.
std::uint64_t uniform_upto(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == std::numeric_limits<std::uint64_t>::max()) return rng();
  const std::uint64_t range = bound + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % range);
  while (true) {
    const std::uint64_t x = rng();
    if (x < limit) return x % range;
  }
}

SplitManifest make_manifest(SplitSpec spec, const EventLog& log, std::vector<std::string> test,
                            std::vector<std::string> train) {
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return SplitManifest{spec, log.name(), std::move(train), std::move(test)};
}

}  // namespace

std::string_view to_string(SplitMethod method) { return method == SplitMethod::random ? "random" : "temporal"; }

std::size_t test_set_size(double test_fraction, std::size_t n_traces) {
  check_fraction(test_fraction);
  const auto k = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n_traces) + 1e-9));
  return std::max<std::size_t>(1, k);
}

SplitManifest split_random(const EventLog& log, double test_fraction, std::uint64_t seed) {
  check_trace_count(log);
  const std::size_t k = test_set_size(test_fraction, log.size());

  std::vector<std::string> ids;
  ids.reserve(log.size());
  for (const auto& t : log.traces()) ids.push_back(t.case_id());
  std::sort(ids.begin(), ids.end());

  std::mt19937_64 rng(seed);
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(uniform_upto(rng, i));
    std::swap(ids[i], ids[j]);
  }
  std::vector<std::string> test(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<std::string> train(ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end());
  return make_manifest({SplitMethod::random, test_fraction, seed}, log, std::move(test), std::move(train));
}

SplitManifest split_temporal(const EventLog& log, double test_fraction) {
  check_trace_count(log);
  const std::size_t k = test_set_size(test_fraction, log.size());

  std::vector<std::pair<Timestamp, std::string>> starts;
  starts.reserve(log.size());
  for (const auto& t : log.traces()) {
    const auto& first = t.events().front();
    if (!first.timestamp) {
      throw InvalidArgument("temporal split: case '" + t.case_id() + "' has no timestamp on its first event");
    }
    starts.emplace_back(*first.timestamp, t.case_id());
  }
  std::sort(starts.begin(), starts.end());

  std::vector<std::string> train;
  std::vector<std::string> test;
  const std::size_t cut = starts.size() - k;
  for (std::size_t i = 0; i < starts.size(); ++i) (i < cut ? train : test).push_back(std::move(starts[i].second));
  return make_manifest({SplitMethod::temporal, test_fraction, std::nullopt}, log, std::move(test), std::move(train));
}

std::pair<EventLog, EventLog> materialize(const EventLog& log, const SplitManifest& manifest) {
  std::set<std::string, std::less<>> train_ids(manifest.train_case_ids.begin(), manifest.train_case_ids.end());
  std::set<std::string, std::less<>> test_ids(manifest.test_case_ids.begin(), manifest.test_case_ids.end());
  for (const auto& id : train_ids) {
    if (test_ids.count(id) != 0) throw InconsistencyError("case '" + id + "' is on both sides of the manifest");
  }
  for (const auto* ids : {&train_ids, &test_ids}) {
    for (const auto& id : *ids) {
      if (log.find(id) == nullptr) throw InconsistencyError("manifest names unknown case '" + id + "'");
    }
  }
  std::vector<Trace> train;
  std::vector<Trace> test;
  for (const auto& t : log.traces()) {
    if (train_ids.count(t.case_id()) != 0) {
      train.push_back(t);
    } else if (test_ids.count(t.case_id()) != 0) {
      test.push_back(t);
    } else {
      throw InconsistencyError("case '" + t.case_id() + "' is missing from the manifest");
    }
  }
  return {EventLog(log.name() + "#train", std::move(train)), EventLog(log.name() + "#test", std::move(test))};
}

std::string manifest_to_json(const SplitManifest& m) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(m.spec.method));
  j["test_fraction"] = m.spec.test_fraction;
  j["seed"] = m.spec.seed ? nlohmann::ordered_json(*m.spec.seed) : nullptr;
  j["shuffle"] = m.spec.method == SplitMethod::random ? nlohmann::ordered_json(std::string(kShuffleAlgorithm)) : nullptr;
  j["test_size_rule"] = std::string(kTestSizeRule);
  j["source_log_name"] = m.source_log_name;
  j["train_case_ids"] = m.train_case_ids;
  j["test_case_ids"] = m.test_case_ids;
  return j.dump(2) + "\n";
}

SplitManifest manifest_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SplitManifest m;
    const auto method = j.at("method").get<std::string>();
    if (method == "random") {
      m.spec.method = SplitMethod::random;
    } else if (method == "temporal") {
      m.spec.method = SplitMethod::temporal;
    } else {
      throw ParseError("unknown split method '" + method + "'");
    }
    m.spec.test_fraction = j.at("test_fraction").get<double>();
    if (j.contains("seed") && !j.at("seed").is_null()) m.spec.seed = j.at("seed").get<std::uint64_t>();
    if (m.spec.method == SplitMethod::random) {
      if (!m.spec.seed) throw ParseError("random split manifest without seed");
      if (j.contains("shuffle") && j.at("shuffle").get<std::string>() != kShuffleAlgorithm) {
        throw ParseError("manifest uses unsupported shuffle '" + j.at("shuffle").get<std::string>() + "'");
      }
    }
    m.source_log_name = j.at("source_log_name").get<std::string>();
    m.train_case_ids = j.at("train_case_ids").get<std::vector<std::string>>();
    m.test_case_ids = j.at("test_case_ids").get<std::vector<std::string>>();
    if (!std::is_sorted(m.train_case_ids.begin(), m.train_case_ids.end()) ||
        !std::is_sorted(m.test_case_ids.begin(), m.test_case_ids.end())) {
      throw ParseError("manifest case id lists must be sorted");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed split manifest: ") + e.what());
  }
}

}  // namespace ppmaudit
