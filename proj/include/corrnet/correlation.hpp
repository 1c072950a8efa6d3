#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "corrnet/error.hpp"
#include "corrnet/ingest.hpp"
#include "corrnet/numeric.hpp"
#include "corrnet/returns.hpp"

namespace corrnet {

/// Symmetric equal-time Pearson matrix of one window. Entries are clamped to
/// [-1, 1] and the diagonal is exactly 1.
struct CorrelationMatrix {
  std::string window_label;
  std::vector<InstrumentId> instruments;
  Eigen::MatrixXd values;

  std::size_t size() const { return instruments.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

/// <r_i r_j> over the window, each entry accumulated independently so the
/// result does not depend on evaluation order.
inline double cross_moment(const NormalizedReturnPanel& normalized, std::size_t i, std::size_t j) {
  auto a = normalized.values.col(static_cast<Eigen::Index>(i));
  auto b = normalized.values.col(static_cast<Eigen::Index>(j));
  CompensatedSum acc;
  for (Eigen::Index t = 0; t < a.size(); ++t) acc.add(a(t) * b(t));
  return acc.value() / static_cast<double>(a.size());
}

inline CorrelationMatrix correlation_matrix(const NormalizedReturnPanel& normalized) {
  if (normalized.cols() < 2)
    throw Error(ErrorKind::TooFewInstruments,
                "window " + normalized.window_label + " has fewer than 2 instruments after exclusion");
  if (normalized.rows() < 3)
    throw Error(ErrorKind::InsufficientRows, "correlation needs at least 3 returns");

  CorrelationMatrix out;
  out.window_label = normalized.window_label;
  out.instruments = normalized.instruments;
  const auto n = static_cast<Eigen::Index>(normalized.cols());
  out.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double c = std::clamp(cross_moment(normalized, static_cast<std::size_t>(i), static_cast<std::size_t>(j)), -1.0, 1.0);
      out.values(i, j) = c;
      out.values(j, i) = c;
    }
  }
  return out;
}

/// Mean of the strictly upper-triangular entries.
inline double mean_correlation(const CorrelationMatrix& corr) {
  if (corr.size() < 2) throw Error(ErrorKind::TooFewInstruments, "mean correlation needs N >= 2");
  CompensatedSum acc;
  for (std::size_t i = 0; i < corr.size(); ++i)
    for (std::size_t j = i + 1; j < corr.size(); ++j) acc.add(corr(i, j));
  const double pairs = static_cast<double>(corr.size() * (corr.size() - 1) / 2);
  return acc.value() / pairs;
}

}  // namespace corrnet
