#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppmaudit/model.hpp"

namespace ppmaudit {

enum class SplitMethod { random, temporal };

std::string_view to_string(SplitMethod method);

struct SplitSpec {
  SplitMethod method = SplitMethod::random;
  double test_fraction = 0.2;
  std::optional<std::uint64_t> seed;  // random method only

  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

// Trace-level train/test assignment. Both id lists are sorted.
struct SplitManifest {
  SplitSpec spec;
  std::string source_log_name;
  std::vector<std::string> train_case_ids;
  std::vector<std::string> test_case_ids;

  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

// Name recorded in every manifest for the shuffle used by split_random.
inline constexpr std::string_view kShuffleAlgorithm = "mt19937_64/fisher-yates-descending/rejection-sampling";

// max(1, floor(fraction * n)). The product is nudged by 1e-9 before flooring
// so that e.g. 0.29 * 100 yields 29 rather than 28.
std::size_t test_set_size(double test_fraction, std::size_t n_traces);

// Sorts the case ids, shuffles them with the seeded generator named by
// kShuffleAlgorithm and takes the first test_set_size ids as the test set.
SplitManifest split_random(const EventLog& log, double test_fraction, std::uint64_t seed);

// Orders traces by first-event timestamp (ties: case id ascending) and puts
// the last test_set_size traces in the test set.
SplitManifest split_temporal(const EventLog& log, double test_fraction);

// Inverse of the manifest: (train, test) logs in original log order.
std::pair<EventLog, EventLog> materialize(const EventLog& log, const SplitManifest& manifest);

// Canonical JSON, LF terminated. Key order: method, test_fraction, seed,
// shuffle, test_size_rule, source_log_name, train_case_ids, test_case_ids.
std::string manifest_to_json(const SplitManifest& manifest);
SplitManifest manifest_from_json(std::string_view text);

}  // namespace ppmaudit
