#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corrnet/error.hpp"
#include "corrnet/netgraph.hpp"

namespace corrnet {

/// Unordered instrument-label pair, stored with first < second.
using EdgeKey = std::pair<std::string, std::string>;

inline EdgeKey make_edge_key(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

/// Sorted, duplicate-free set of label pairs. Links are matched by label so
/// that networks over different node sets stay comparable.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::vector<EdgeKey> keys) : keys_(std::move(keys)) {
    for (auto& k : keys_)
      if (k.second < k.first) std::swap(k.first, k.second);
    std::sort(keys_.begin(), keys_.end());
    keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
  }

  static EdgeSet of(const Graph& g) {
    std::vector<EdgeKey> keys;
    keys.reserve(g.edge_count());
    for (const auto& e : g.edges()) keys.push_back(make_edge_key(g.label(e.u).label, g.label(e.v).label));
    return EdgeSet(std::move(keys));
  }
  static EdgeSet of(const Cluster& c) { return of(c.graph); }

  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  const std::vector<EdgeKey>& keys() const { return keys_; }

 private:
  std::vector<EdgeKey> keys_;
};

/// N1 = common links, N = |E_a| + |E_b|.
struct JaccardCounts {
  std::size_t common = 0;
  std::size_t total = 0;
};

inline JaccardCounts jaccard_counts(const EdgeSet& a, const EdgeSet& b) {
  JaccardCounts c;
  c.total = a.size() + b.size();
  auto x = a.keys().begin();
  auto y = b.keys().begin();
  while (x != a.keys().end() && y != b.keys().end()) {
    if (*x < *y) ++x;
    else if (*y < *x) ++y;
    else {
      ++c.common;
      ++x;
      ++y;
    }
  }
  return c;
}

/// J = N1 / (N - N1). Absent when both edge sets are empty; 0 when exactly
/// one is.
inline std::optional<double> jaccard(const EdgeSet& a, const EdgeSet& b) {
  auto c = jaccard_counts(a, b);
  if (c.total == 0) return std::nullopt;
  return static_cast<double>(c.common) / static_cast<double>(c.total - c.common);
}

inline std::optional<double> jaccard(const Cluster& a, const Cluster& b) {
  return jaccard(EdgeSet::of(a), EdgeSet::of(b));
}

struct SimilarityMatrix {
  std::vector<std::string> window_labels;
  double theta = 0.3;
  std::vector<std::optional<double>> values;  // row-major W x W

  std::size_t size() const { return window_labels.size(); }
  const std::optional<double>& operator()(std::size_t a, std::size_t b) const { return values[a * size() + b]; }
};

inline SimilarityMatrix similarity_matrix(const std::vector<EdgeSet>& edge_sets, std::vector<std::string> labels,
                                          double theta) {
  if (edge_sets.size() != labels.size())
    throw Error(ErrorKind::InvalidArgument, "one label per edge set required");
  if (edge_sets.size() < 2) throw Error(ErrorKind::InvalidArgument, "similarity matrix needs at least 2 windows");
  const std::size_t w = edge_sets.size();
  SimilarityMatrix sim;
  sim.window_labels = std::move(labels);
  sim.theta = theta;
  sim.values.assign(w * w, std::nullopt);
  for (std::size_t a = 0; a < w; ++a) {
    sim.values[a * w + a] = jaccard(edge_sets[a], edge_sets[a]);
    for (std::size_t b = a + 1; b < w; ++b) {
      auto j = jaccard(edge_sets[a], edge_sets[b]);
      sim.values[a * w + b] = j;
      sim.values[b * w + a] = j;
    }
  }
  return sim;
}

inline SimilarityMatrix similarity_matrix(const std::vector<Cluster>& clusters) {
  std::vector<EdgeSet> sets;
  std::vector<std::string> labels;
  for (const auto& c : clusters) {
    sets.push_back(EdgeSet::of(c));
    labels.push_back(c.window_label);
  }
  double theta = clusters.empty() ? 0.3 : clusters.front().theta;
  return similarity_matrix(sets, std::move(labels), theta);
}

inline std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

struct RegimeFlag {
  std::string window_label;
  double adjacent_similarity;  // J(w, w-1)
};

/// Flags window w when J(w, w-1) < drop * median of all adjacent-pair
/// similarities. Undefined adjacent pairs are skipped.
inline std::vector<RegimeFlag> regime_flags(const SimilarityMatrix& sim, double drop = 0.5) {
  if (!(drop > 0.0 && drop < 1.0)) throw Error(ErrorKind::InvalidArgument, "regime drop must lie in (0, 1)");
  if (sim.size() < 2) throw Error(ErrorKind::InvalidArgument, "regime flags need at least 2 windows");
  std::vector<double> adjacent;
  for (std::size_t w = 1; w < sim.size(); ++w)
    if (sim(w, w - 1)) adjacent.push_back(*sim(w, w - 1));
  auto mid = median(adjacent);
  std::vector<RegimeFlag> flags;
  if (!mid) return flags;
  for (std::size_t w = 1; w < sim.size(); ++w) {
    const auto& j = sim(w, w - 1);
    if (j && *j < drop * *mid) flags.push_back({sim.window_labels[w], *j});
  }
  return flags;
}

}  // namespace corrnet
