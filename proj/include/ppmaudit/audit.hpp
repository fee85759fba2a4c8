#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppmaudit/model.hpp"

namespace ppmaudit {

using LabelCounts = std::map<std::string, std::uint64_t, std::less<>>;

// Next-activity frequencies per control-flow prefix, stored as a trie over
// activity labels. A node's counts are the labels that followed exactly the
// activity path leading to it.
class PrefixIndex {
 public:
  PrefixIndex();

  void add(std::span<const Event> prefix, std::string_view label);
  void add(const PrefixSample& sample) { add(sample.prefix(), sample.label()); }
  void add(const ControlFlowKey& key, std::string_view label, std::uint64_t count = 1);

  // Counts for the exact key, or nullptr when it was never indexed.
  const LabelCounts* find(std::span<const Event> prefix) const;
  const LabelCounts* find(const ControlFlowKey& key) const;
  bool contains(std::span<const Event> prefix) const { return find(prefix) != nullptr; }

  // Adds every (key, label, count) of `other`. Merging is commutative and
  // associative, so chunked builds merge to the sequential result.
  void merge(const PrefixIndex& other);

  std::uint64_t total_count() const noexcept { return total_; }
  std::size_t key_count() const noexcept { return keys_; }
  bool empty() const noexcept { return total_ == 0; }

  // Visits keys in lexicographic order of their activity sequences.
  void for_each(const std::function<void(const ControlFlowKey&, const LabelCounts&)>& visit) const;

  friend bool operator==(const PrefixIndex& a, const PrefixIndex& b);

 private:
  struct Node {
    std::map<std::string, std::uint32_t, std::less<>> children;
    LabelCounts counts;
  };

  std::uint32_t child(std::uint32_t node, std::string_view activity);
  template <typename Range>
  const LabelCounts* lookup(const Range& activities) const;

  std::vector<Node> nodes_;
  std::uint64_t total_ = 0;
  std::size_t keys_ = 0;
};

PrefixIndex build_index(std::span<const PrefixSample> samples);

// Same result as build_index, folded over `workers` chunks in parallel.
PrefixIndex build_index_parallel(std::span<const PrefixSample> samples, unsigned workers);

// Largest count in `counts` (0 when empty).
std::uint64_t max_count(const LabelCounts& counts);

struct LeakageReport {
  std::uint64_t test_samples_total = 0;
  std::uint64_t test_samples_leaked = 0;
  double leakage_pct = 0.0;
  std::uint64_t unique_test_keys_total = 0;
  std::uint64_t unique_test_keys_leaked = 0;
  double unique_leakage_pct = 0.0;
  bool empty = true;  // no test samples; percentages are 0 by convention
};

enum class LimitReference { test, train };

std::string_view to_string(LimitReference reference);

struct AmbiguityReport {
  double accuracy_limit = 0.0;        // in [0, 1]
  double ambiguous_sample_pct = 0.0;  // in [0, 100]
  LimitReference reference = LimitReference::test;
  std::uint64_t test_samples_total = 0;
  std::uint64_t test_samples_at_max = 0;  // samples a best such predictor gets right
  bool empty = true;
};

// A test sample leaks when its control-flow key occurs in the training index.
LeakageReport compute_leakage(const PrefixIndex& train_index, std::span<const PrefixSample> test_samples);

// Best accuracy of a predictor that answers each key with one of the labels
// holding the maximum count in the reference index. Absent keys count 0.
// With reference=test this is the sum of per-key maxima over the total.
AmbiguityReport compute_accuracy_limit(const PrefixIndex& reference_index, std::span<const PrefixSample> test_samples,
                                       LimitReference reference = LimitReference::test);

struct SplitAudit {
  LeakageReport leakage;
  AmbiguityReport ambiguity;
  std::uint64_t train_samples = 0;
  std::uint64_t test_samples = 0;
};

SplitAudit audit_split(const EventLog& train, const EventLog& test, LimitReference reference = LimitReference::test);

}  // namespace ppmaudit
