#include "ppmaudit/audit.hpp"

#include <algorithm>
#include <set>
#include <thread>

namespace ppmaudit {
namespace {

double percentage(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

struct ActivityOf {
  const std::string& operator()(const Event& e) const { return e.activity; }
  const std::string& operator()(const std::string& s) const { return s; }
};

}  // namespace

PrefixIndex::PrefixIndex() : nodes_(1) {}

std::uint32_t PrefixIndex::child(std::uint32_t node, std::string_view activity) {
  auto& children = nodes_[node].children;
  if (const auto it = children.find(activity); it != children.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_[node].children.emplace(std::string(activity), id);
  nodes_.emplace_back();
  return id;
}

void PrefixIndex::add(std::span<const Event> prefix, std::string_view label) {
  std::uint32_t node = 0;
  for (const auto& e : prefix) node = child(node, e.activity);
  auto& counts = nodes_[node].counts;
  if (counts.empty()) ++keys_;
  auto it = counts.find(label);
  if (it == counts.end()) it = counts.emplace(std::string(label), 0).first;
  ++it->second;
  ++total_;
}

void PrefixIndex::add(const ControlFlowKey& key, std::string_view label, std::uint64_t count) {
  if (count == 0) return;
  std::uint32_t node = 0;
  for (const auto& a : key.activities()) node = child(node, a);
  auto& counts = nodes_[node].counts;
  if (counts.empty()) ++keys_;
  auto it = counts.find(label);
  if (it == counts.end()) it = counts.emplace(std::string(label), 0).first;
  it->second += count;
  total_ += count;
}

template <typename Range>
const LabelCounts* PrefixIndex::lookup(const Range& activities) const {
  std::uint32_t node = 0;
  for (const auto& item : activities) {
    const auto& children = nodes_[node].children;
    const auto it = children.find(ActivityOf{}(item));
    if (it == children.end()) return nullptr;
    node = it->second;
  }
  const auto& counts = nodes_[node].counts;
  return counts.empty() ? nullptr : &counts;
}

const LabelCounts* PrefixIndex::find(std::span<const Event> prefix) const { return lookup(prefix); }

const LabelCounts* PrefixIndex::find(const ControlFlowKey& key) const { return lookup(key.activities()); }

void PrefixIndex::merge(const PrefixIndex& other) {
  other.for_each([this](const ControlFlowKey& key, const LabelCounts& counts) {
    for (const auto& [label, n] : counts) add(key, label, n);
  });
}

void PrefixIndex::for_each(const std::function<void(const ControlFlowKey&, const LabelCounts&)>& visit) const {
  std::vector<std::string> path;
  // Depth-first over std::map children yields lexicographic key order.
  std::function<void(std::uint32_t)> walk = [&](std::uint32_t node) {
    const auto& n = nodes_[node];
    if (!n.counts.empty()) visit(ControlFlowKey(path), n.counts);
    for (const auto& [activity, id] : n.children) {
      path.push_back(activity);
      walk(id);
      path.pop_back();
    }
  };
  walk(0);
}

bool operator==(const PrefixIndex& a, const PrefixIndex& b) {
  if (a.total_ != b.total_ || a.keys_ != b.keys_) return false;
  std::vector<std::pair<ControlFlowKey, LabelCounts>> lhs;
  std::vector<std::pair<ControlFlowKey, LabelCounts>> rhs;
  a.for_each([&](const ControlFlowKey& k, const LabelCounts& c) { lhs.emplace_back(k, c); });
  b.for_each([&](const ControlFlowKey& k, const LabelCounts& c) { rhs.emplace_back(k, c); });
  return lhs == rhs;
}

PrefixIndex build_index(std::span<const PrefixSample> samples) {
  PrefixIndex index;
  for (const auto& s : samples) index.add(s);
  return index;
}

PrefixIndex build_index_parallel(std::span<const PrefixSample> samples, unsigned workers) {
  workers = std::max(1u, workers);
  if (workers == 1 || samples.size() < workers) return build_index(samples);
  std::vector<PrefixIndex> partial(workers);
  std::vector<std::thread> threads;
  const std::size_t chunk = (samples.size() + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(samples.size(), w * chunk);
    const std::size_t end = std::min(samples.size(), begin + chunk);
    threads.emplace_back([&partial, w, part = samples.subspan(begin, end - begin)] { partial[w] = build_index(part); });
  }
  for (auto& t : threads) t.join();
  PrefixIndex merged;
  for (const auto& p : partial) merged.merge(p);
  return merged;
}

std::uint64_t max_count(const LabelCounts& counts) {
  std::uint64_t best = 0;
  for (const auto& [label, n] : counts) best = std::max(best, n);
  return best;
}

std::string_view to_string(LimitReference reference) { return reference == LimitReference::test ? "test" : "train"; }

LeakageReport compute_leakage(const PrefixIndex& train_index, std::span<const PrefixSample> test_samples) {
  LeakageReport r;
  std::set<ControlFlowKey> unique_keys;
  std::set<ControlFlowKey> unique_leaked;
  for (const auto& s : test_samples) {
    const bool leaked = train_index.contains(s.prefix());
    auto key = control_flow_key(s.prefix());
    if (leaked) {
      ++r.test_samples_leaked;
      unique_leaked.insert(key);
    }
    unique_keys.insert(std::move(key));
  }
  r.test_samples_total = test_samples.size();
  r.unique_test_keys_total = unique_keys.size();
  r.unique_test_keys_leaked = unique_leaked.size();
  r.leakage_pct = percentage(r.test_samples_leaked, r.test_samples_total);
  r.unique_leakage_pct = percentage(r.unique_test_keys_leaked, r.unique_test_keys_total);
  r.empty = test_samples.empty();
  return r;
}

AmbiguityReport compute_accuracy_limit(const PrefixIndex& reference_index, std::span<const PrefixSample> test_samples,
                                       LimitReference reference) {
  AmbiguityReport r;
  r.reference = reference;
  std::uint64_t ambiguous = 0;
  build_index(test_samples).for_each([&](const ControlFlowKey& key, const LabelCounts& observed) {
    const auto* counts = reference_index.find(key);
    if (counts == nullptr) return;
    std::uint64_t n = 0;
    for (const auto& [label, c] : observed) n += c;
    if (counts->size() > 1) ambiguous += n;
    const auto top = max_count(*counts);
    std::uint64_t best = 0;
    for (const auto& [label, c] : *counts) {
      if (c != top) continue;
      const auto it = observed.find(label);
      if (it != observed.end()) best = std::max(best, it->second);
    }
    r.test_samples_at_max += best;
  });
  r.test_samples_total = test_samples.size();
  r.empty = test_samples.empty();
  r.accuracy_limit =
      r.empty ? 0.0 : static_cast<double>(r.test_samples_at_max) / static_cast<double>(r.test_samples_total);
  r.ambiguous_sample_pct = percentage(ambiguous, r.test_samples_total);
  return r;
}

SplitAudit audit_split(const EventLog& train, const EventLog& test, LimitReference reference) {
  const auto train_samples = enumerate_log_samples(train);
  const auto test_samples = enumerate_log_samples(test);
  const auto train_index = build_index(train_samples);
  SplitAudit out;
  out.train_samples = train_samples.size();
  out.test_samples = test_samples.size();
  out.leakage = compute_leakage(train_index, test_samples);
  if (reference == LimitReference::train) {
    out.ambiguity = compute_accuracy_limit(train_index, test_samples, reference);
  } else {
    out.ambiguity = compute_accuracy_limit(build_index(test_samples), test_samples, reference);
  }
  return out;
}

}  // namespace ppmaudit
