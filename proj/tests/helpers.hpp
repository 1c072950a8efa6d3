#pragma once

#include <string>
#include <utility>
#include <vector>

#include "corrnet/corrnet.hpp"
#include "oracles.hpp"

namespace testing_helpers {

inline std::vector<corrnet::InstrumentId> labels(std::size_t n, const std::string& prefix = "N") {
  std::vector<corrnet::InstrumentId> out;
  for (std::size_t k = 0; k < n; ++k) out.emplace_back(prefix + (k < 10 ? "0" : "") + std::to_string(k));
  return out;
}

inline corrnet::Graph graph_from(const oracle::AdjMatrix& adj) {
  std::vector<corrnet::WeightedEdge> edges;
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (std::size_t j = i + 1; j < adj.size(); ++j)
      if (adj[i][j]) edges.push_back({i, j, 1.0});
  return corrnet::Graph(labels(adj.size()), std::move(edges));
}

/// Graph over named nodes with edges given as label pairs.
inline corrnet::Graph graph_of(const std::vector<std::string>& names,
                               const std::vector<std::pair<std::string, std::string>>& links) {
  std::vector<corrnet::InstrumentId> ids;
  for (const auto& n : names) ids.emplace_back(n);
  auto index = [&](const std::string& s) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), s) - names.begin());
  };
  std::vector<corrnet::WeightedEdge> edges;
  for (const auto& [a, b] : links) edges.push_back({index(a), index(b), 1.0});
  return corrnet::Graph(std::move(ids), std::move(edges));
}

inline corrnet::CorrelationMatrix corr_from(const Eigen::MatrixXd& m, const std::vector<std::string>& names = {}) {
  corrnet::CorrelationMatrix c;
  c.window_label = "w";
  c.values = m;
  if (names.empty()) c.instruments = labels(static_cast<std::size_t>(m.rows()));
  else
    for (const auto& n : names) c.instruments.emplace_back(n);
  return c;
}

/// Random valid correlation matrix: normalized Gram matrix of random vectors.
inline Eigen::MatrixXd random_correlation(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n + 3));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = g(rng) + (j == 0 ? 1.0 : 0.0);
  Eigen::MatrixXd c = x * x.transpose();
  Eigen::VectorXd d = c.diagonal().cwiseSqrt().cwiseInverse();
  c = d.asDiagonal() * c * d.asDiagonal();
  c.diagonal().setOnes();
  return c;
}

/// Price panel from a return matrix (rows = returns), starting at 100.
inline corrnet::PricePanel panel_from_returns(const Eigen::MatrixXd& r) {
  corrnet::PricePanel p;
  p.dates = corrnet::business_days(corrnet::Date(2000, 1, 3), static_cast<std::size_t>(r.rows() + 1));
  p.instruments = labels(static_cast<std::size_t>(r.cols()), "X");
  p.closes.resize(r.rows() + 1, r.cols());
  p.filled.setConstant(r.rows() + 1, r.cols(), false);
  for (Eigen::Index c = 0; c < r.cols(); ++c) {
    double lp = std::log(100.0);
    p.closes(0, c) = 100.0;
    for (Eigen::Index t = 0; t < r.rows(); ++t) {
      lp += r(t, c);
      p.closes(t + 1, c) = std::exp(lp);
    }
  }
  return p;
}


/// Largest clusters of consecutive fixed-length windows of a panel.
inline std::vector<corrnet::Cluster> window_clusters(const corrnet::PricePanel& panel, std::size_t length,
                                                     double theta) {
  corrnet::WindowSpec spec{corrnet::WindowMode::FixedLength, length, length, 50};
  std::vector<corrnet::Cluster> out;
  for (const auto& w : corrnet::slice_windows(panel, spec)) {
    auto corr = corrnet::correlation_matrix(corrnet::normalize(corrnet::log_returns(w)));
    out.push_back(corrnet::largest_cluster(corrnet::build_threshold_network(corr, theta)));
  }
  return out;
}

/// 20 instruments, 8 windows of 260 returns; blocks (12, 8) switch to (8, 12)
/// at `switch_window`.
inline corrnet::SynthSpec two_regime_spec(std::uint64_t seed, std::size_t switch_window) {
  corrnet::SynthSpec s;
  s.seed = seed;
  s.n_instruments = 20;
  s.n_days = 8 * 260;
  s.blocks = {{12, 0.6}, {8, 0.6}};
  s.cross_correlation = 0.05;
  s.regime_switch = corrnet::RegimeSwitch{switch_window, 260, {{8, 0.6}, {12, 0.6}}, std::nullopt};
  return s;
}

/// Two planted blocks of 10 (rho_in 0.6, rho_out 0.05) over 260 returns.
inline corrnet::SynthSpec two_block_spec(std::uint64_t seed) {
  corrnet::SynthSpec s;
  s.seed = seed;
  s.n_instruments = 20;
  s.n_days = 261;
  s.blocks = {{10, 0.6}, {10, 0.6}};
  s.cross_correlation = 0.05;
  return s;
}

/// True when the theta-network's components are exactly the two blocks
/// {0..9} and {10..19}, checked by union-find on the thresholded matrix.
inline bool splits_into_two_blocks(const corrnet::CorrelationMatrix& corr, double theta) {
  oracle::AdjMatrix adj(corr.size(), std::vector<bool>(corr.size(), false));
  for (std::size_t i = 0; i < corr.size(); ++i)
    for (std::size_t j = 0; j < corr.size(); ++j) adj[i][j] = i != j && corr(i, j) >= theta;
  auto comps = oracle::components(adj);
  if (comps.size() != 2) return false;
  std::set<std::size_t> first, second;
  for (std::size_t k = 0; k < 10; ++k) {
    first.insert(k);
    second.insert(k + 10);
  }
  return (comps[0] == first && comps[1] == second) || (comps[0] == second && comps[1] == first);
}

}  // namespace testing_helpers
