#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corrnet/correlation.hpp"
#include "corrnet/error.hpp"
#include "corrnet/ingest.hpp"

namespace corrnet {

/// Anything exposing node count and a sorted neighbor range per node.
template <class G>
concept NeighborGraph = requires(const G& g, std::size_t u) {
  { g.node_count() } -> std::convertible_to<std::size_t>;
  { g.neighbors(u) } -> std::ranges::forward_range;
};

struct WeightedEdge {
  std::size_t u;  // u < v
  std::size_t v;
  double weight;
};

/// Labeled undirected simple graph. Adjacency is kept as sorted neighbor
/// lists; edges are kept sorted by (u, v).
class Graph {
 public:
  Graph() = default;

  Graph(std::vector<InstrumentId> labels, std::vector<WeightedEdge> edges)
      : labels_(std::move(labels)), edges_(std::move(edges)), adjacency_(labels_.size()) {
    for (auto& e : edges_) {
      if (e.u == e.v) throw Error(ErrorKind::InvalidArgument, "self-loop on " + labels_.at(e.u).label);
      if (e.u >= labels_.size() || e.v >= labels_.size())
        throw Error(ErrorKind::InvalidArgument, "edge endpoint out of range");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
    auto dup = std::adjacent_find(edges_.begin(), edges_.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      return a.u == b.u && a.v == b.v;
    });
    if (dup != edges_.end()) throw Error(ErrorKind::InvalidArgument, "duplicate edge");
    for (const auto& e : edges_) {
      adjacency_[e.u].push_back(e.v);
      adjacency_[e.v].push_back(e.u);
    }
    for (auto& list : adjacency_) std::sort(list.begin(), list.end());
  }

  std::size_t node_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const std::size_t> neighbors(std::size_t u) const { return adjacency_[u]; }
  std::size_t degree(std::size_t u) const { return adjacency_[u].size(); }
  const InstrumentId& label(std::size_t u) const { return labels_[u]; }
  const std::vector<InstrumentId>& labels() const { return labels_; }
  const std::vector<WeightedEdge>& edges() const { return edges_; }

  /// Subgraph induced by `nodes` (indices into this graph), in the given order.
  Graph induced(std::span<const std::size_t> nodes) const {
    std::vector<std::size_t> remap(labels_.size(), npos);
    std::vector<InstrumentId> labels;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      remap[nodes[k]] = k;
      labels.push_back(labels_[nodes[k]]);
    }
    std::vector<WeightedEdge> edges;
    for (const auto& e : edges_)
      if (remap[e.u] != npos && remap[e.v] != npos) edges.push_back({remap[e.u], remap[e.v], e.weight});
    return Graph(std::move(labels), std::move(edges));
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<InstrumentId> labels_;
  std::vector<WeightedEdge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

static_assert(NeighborGraph<Graph>);

struct ThresholdNetwork {
  std::string window_label;
  double theta = 0.3;
  Graph graph;
};

/// Largest connected component of a threshold network, as an induced subgraph.
struct Cluster {
  std::string window_label;
  double theta = 0.3;
  Graph graph;
};

enum class DensityConvention { Prose, PaperLiteral };
enum class ClusteringRule { Paper, Standard };

constexpr std::string_view to_string(DensityConvention c) {
  return c == DensityConvention::Prose ? "prose" : "paper";
}
constexpr std::string_view to_string(ClusteringRule r) {
  return r == ClusteringRule::Paper ? "paper" : "standard";
}

/// Links every pair with C_ij >= theta. Every matrix instrument becomes a node.
inline ThresholdNetwork build_threshold_network(const CorrelationMatrix& corr, double theta) {
  if (!(theta >= -1.0 && theta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "theta must lie in [-1, 1]");
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < corr.size(); ++i)
    for (std::size_t j = i + 1; j < corr.size(); ++j)
      if (corr(i, j) >= theta) edges.push_back({i, j, corr(i, j)});
  return ThresholdNetwork{corr.window_label, theta, Graph(corr.instruments, std::move(edges))};
}

/// Connected components, each listed in ascending node order; components are
/// ordered by their smallest node.
template <NeighborGraph G>
std::vector<std::vector<std::size_t>> connected_components(const G& g) {
  std::vector<std::vector<std::size_t>> components;
  std::vector<bool> seen(g.node_count(), false);
  for (std::size_t start = 0; start < g.node_count(); ++start) {
    if (seen[start]) continue;
    auto& component = components.emplace_back();
    std::deque<std::size_t> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      component.push_back(u);
      for (std::size_t v : g.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = true;
          queue.push_back(v);
        }
      }
    }
    std::sort(component.begin(), component.end());
  }
  return components;
}

/// Hop distances from `source`; -1 marks unreachable nodes.
template <NeighborGraph G>
std::vector<std::int64_t> bfs_distances(const G& g, std::size_t source) {
  std::vector<std::int64_t> dist(g.node_count(), -1);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

/// Largest component; ties go to the component whose smallest label sorts first.
inline Cluster largest_cluster(const ThresholdNetwork& net) {
  if (net.graph.node_count() == 0) throw Error(ErrorKind::InvalidArgument, "network has no nodes");
  auto components = connected_components(net.graph);
  auto min_label = [&](const std::vector<std::size_t>& comp) {
    const std::string* best = &net.graph.label(comp.front()).label;
    for (std::size_t u : comp)
      if (net.graph.label(u).label < *best) best = &net.graph.label(u).label;
    return *best;
  };
  std::size_t best = 0;
  for (std::size_t k = 1; k < components.size(); ++k) {
    const auto& a = components[k];
    const auto& b = components[best];
    if (a.size() > b.size() || (a.size() == b.size() && min_label(a) < min_label(b))) best = k;
  }
  return Cluster{net.window_label, net.theta, net.graph.induced(components[best])};
}

/// Link density; absent for fewer than 2 nodes.
template <NeighborGraph G>
std::optional<double> density(const G& g, DensityConvention convention = DensityConvention::Prose) {
  const std::size_t n = g.node_count();
  if (n < 2) return std::nullopt;
  std::size_t twice_m = 0;
  for (std::size_t u = 0; u < n; ++u) twice_m += static_cast<std::size_t>(std::ranges::distance(g.neighbors(u)));
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  return convention == DensityConvention::Prose ? static_cast<double>(twice_m) / pairs
                                                : static_cast<double>(twice_m / 2) / pairs;
}

/// Mean shortest-path hop count over all unordered pairs, BFS from every
/// node. Absent for fewer than 2 nodes; the graph must be connected.
template <NeighborGraph G>
std::optional<double> characteristic_path_length(const G& g) {
  const std::size_t n = g.node_count();
  if (n < 2) return std::nullopt;
  std::uint64_t total = 0;
  for (std::size_t s = 0; s < n; ++s) {
    auto dist = bfs_distances(g, s);
    for (std::size_t t = s + 1; t < n; ++t) {
      if (dist[t] < 0) throw Error(ErrorKind::InvalidArgument, "path length requires a connected graph");
      total += static_cast<std::uint64_t>(dist[t]);
    }
  }
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  return static_cast<double>(total) / static_cast<double>(pairs);
}

/// Number of links among the neighbors of `u`, by sorted-list intersection.
template <NeighborGraph G>
std::size_t neighbor_links(const G& g, std::size_t u) {
  std::size_t twice = 0;
  auto nu = g.neighbors(u);
  for (std::size_t v : nu) {
    auto nv = g.neighbors(v);
    auto a = std::ranges::begin(nu);
    auto b = std::ranges::begin(nv);
    while (a != std::ranges::end(nu) && b != std::ranges::end(nv)) {
      if (*a < *b) ++a;
      else if (*b < *a) ++b;
      else {
        ++twice;
        ++a;
        ++b;
      }
    }
  }
  return twice / 2;
}

/// C_u = 2 m_u / (n_u (n_u - 1)). ClusteringRule::Paper sets C_u = 0 for n_u <= 2,
/// the standard rule only for n_u < 2.
template <NeighborGraph G>
double local_clustering(const G& g, std::size_t u, ClusteringRule rule = ClusteringRule::Paper) {
  const auto n = static_cast<std::size_t>(std::ranges::distance(g.neighbors(u)));
  const std::size_t cutoff = rule == ClusteringRule::Paper ? 2 : 1;
  if (n <= cutoff) return 0.0;
  return 2.0 * static_cast<double>(neighbor_links(g, u)) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

template <NeighborGraph G>
double average_clustering(const G& g, ClusteringRule rule = ClusteringRule::Paper) {
  const std::size_t n = g.node_count();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t u = 0; u < n; ++u) sum += local_clustering(g, u, rule);
  return sum / static_cast<double>(n);
}

/// Topology of the largest cluster of one window at one threshold.
struct WindowReport {
  std::string window_label;
  double theta = 0.3;
  std::size_t cluster_size = 0;  // N
  std::size_t edge_count = 0;    // M
  std::optional<double> density;
  std::optional<double> path_length;
  double clustering = 0.0;
  DensityConvention density_convention = DensityConvention::Prose;
  ClusteringRule clustering_rule = ClusteringRule::Paper;
};

inline WindowReport window_report(const Cluster& cluster, DensityConvention convention = DensityConvention::Prose,
                                  ClusteringRule rule = ClusteringRule::Paper) {
  WindowReport r;
  r.window_label = cluster.window_label;
  r.theta = cluster.theta;
  r.cluster_size = cluster.graph.node_count();
  r.edge_count = cluster.graph.edge_count();
  r.density = density(cluster.graph, convention);
  r.path_length = characteristic_path_length(cluster.graph);
  r.clustering = average_clustering(cluster.graph, rule);
  r.density_convention = convention;
  r.clustering_rule = rule;
  return r;
}

inline WindowReport window_report(const CorrelationMatrix& corr, double theta,
                                  DensityConvention convention = DensityConvention::Prose,
                                  ClusteringRule rule = ClusteringRule::Paper) {
  return window_report(largest_cluster(build_threshold_network(corr, theta)), convention, rule);
}

}  // namespace corrnet
