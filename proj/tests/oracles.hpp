#pragma once

// Independent reference implementations used only by tests. None of these
// share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

/// Textbook two-pass Pearson coefficient on raw samples.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

using AdjMatrix = std::vector<std::vector<bool>>;

/// All-pairs hop distances; -1 where unreachable.
inline std::vector<std::vector<long>> floyd_warshall(const AdjMatrix& adj) {
  const std::size_t n = adj.size();
  const long inf = std::numeric_limits<long>::max() / 4;
  std::vector<std::vector<long>> d(n, std::vector<long>(n, inf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (adj[i][j]) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  for (auto& row : d)
    for (auto& v : row)
      if (v == inf) v = -1;
  return d;
}

/// Mean shortest path over unordered pairs, from Floyd-Warshall.
inline double mean_path_length(const AdjMatrix& adj) {
  auto d = floyd_warshall(adj);
  long total = 0, pairs = 0;
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (std::size_t j = i + 1; j < adj.size(); ++j) {
      total += d[i][j];
      ++pairs;
    }
  return static_cast<double>(total) / static_cast<double>(pairs);
}

/// Average clustering by enumerating every neighbor triple. `zero_at` is the
/// largest degree whose coefficient is forced to 0 (1 = standard, 2 = paper).
inline double average_clustering(const AdjMatrix& adj, std::size_t zero_at) {
  const std::size_t n = adj.size();
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> nb;
    for (std::size_t j = 0; j < n; ++j)
      if (adj[i][j]) nb.push_back(j);
    if (nb.size() <= zero_at) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b)
        if (adj[nb[a]][nb[b]]) ++links;
    sum += 2.0 * static_cast<double>(links) / static_cast<double>(nb.size() * (nb.size() - 1));
  }
  return sum / static_cast<double>(n);
}

/// Component label per node via union-find over the adjacency matrix.
inline std::vector<std::size_t> component_labels(const AdjMatrix& adj) {
  std::vector<std::size_t> parent(adj.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (std::size_t j = i + 1; j < adj.size(); ++j)
      if (adj[i][j]) parent[find(i)] = find(j);
  std::vector<std::size_t> out(adj.size());
  for (std::size_t i = 0; i < adj.size(); ++i) out[i] = find(i);
  return out;
}

/// Node sets of all components, each sorted, sorted by size descending.
inline std::vector<std::set<std::size_t>> components(const AdjMatrix& adj) {
  auto labels = component_labels(adj);
  std::vector<std::set<std::size_t>> groups;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    auto it = std::find(roots.begin(), roots.end(), labels[i]);
    if (it == roots.end()) {
      roots.push_back(labels[i]);
      groups.push_back({i});
    } else {
      groups[static_cast<std::size_t>(it - roots.begin())].insert(i);
    }
  }
  std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return groups;
}

/// Random connected simple graph: a random spanning tree plus extra edges.
inline AdjMatrix random_connected_graph(std::size_t n, double extra_p, std::mt19937_64& rng) {
  AdjMatrix adj(n, std::vector<bool>(n, false));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t k = 1; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::size_t a = order[k], b = order[pick(rng)];
    adj[a][b] = adj[b][a] = true;
  }
  std::bernoulli_distribution coin(extra_p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) adj[i][j] = adj[j][i] = true;
  return adj;
}

}  // namespace oracle
