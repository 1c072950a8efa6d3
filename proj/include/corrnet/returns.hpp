#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "corrnet/error.hpp"
#include "corrnet/ingest.hpp"
#include "corrnet/numeric.hpp"

namespace corrnet {

/// Log returns for one window: row t is ln(close[t+1]) - ln(close[t]).
struct ReturnPanel {
  std::string window_label;
  std::vector<Date> dates;  // date of the later close of each pair
  std::vector<InstrumentId> instruments;
  Eigen::MatrixXd values;   // [return][instrument]

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

struct VolatilityReport {
  std::string window_label;
  std::vector<std::pair<InstrumentId, double>> per_index;
  double cross_sectional_mean = 0.0;
};

/// Zero-mean, unit-variance returns. Columns whose standard deviation falls
/// below the floor are removed and listed in `excluded`.
struct NormalizedReturnPanel {
  std::string window_label;
  std::vector<Date> dates;
  std::vector<InstrumentId> instruments;
  Eigen::MatrixXd values;
  std::vector<InstrumentId> excluded;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

inline constexpr double kDefaultSigmaFloor = 1e-12;

inline ReturnPanel log_returns(const PricePanel& prices, std::string window_label = {}) {
  if (prices.rows() < 2)
    throw Error(ErrorKind::InsufficientRows, "log returns need at least 2 price rows");
  ReturnPanel out;
  out.window_label = std::move(window_label);
  out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
  out.instruments = prices.instruments;
  const Eigen::Index t = prices.closes.rows() - 1;
  out.values.resize(t, prices.closes.cols());
  for (Eigen::Index c = 0; c < prices.closes.cols(); ++c)
    for (Eigen::Index r = 0; r < t; ++r)
      out.values(r, c) = std::log(prices.closes(r + 1, c)) - std::log(prices.closes(r, c));
  return out;
}

inline ReturnPanel log_returns(const PriceWindow& window) {
  return log_returns(window.prices, window.label);
}

/// Mean absolute log return per instrument, plus its cross-sectional mean.
inline VolatilityReport volatility(const ReturnPanel& returns) {
  if (returns.rows() < 1) throw Error(ErrorKind::InsufficientRows, "volatility needs at least 1 return");
  VolatilityReport report;
  report.window_label = returns.window_label;
  CompensatedSum across;
  for (std::size_t c = 0; c < returns.cols(); ++c) {
    CompensatedSum acc;
    for (Eigen::Index r = 0; r < returns.values.rows(); ++r)
      acc.add(std::abs(returns.values(r, static_cast<Eigen::Index>(c))));
    double v = acc.value() / static_cast<double>(returns.rows());
    report.per_index.emplace_back(returns.instruments[c], v);
    across.add(v);
  }
  if (!report.per_index.empty())
    report.cross_sectional_mean = across.value() / static_cast<double>(report.per_index.size());
  return report;
}

/// Standardizes each column with its mean and the standard deviation taken
/// over the count of returns (not count - 1), so <r_i r_i> is exactly 1.
inline NormalizedReturnPanel normalize(const ReturnPanel& returns, double sigma_floor = kDefaultSigmaFloor) {
  if (returns.rows() < 3)
    throw Error(ErrorKind::InsufficientRows, "normalization needs at least 3 returns");
  if (!(sigma_floor > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma floor must be positive");

  const Eigen::Index t = returns.values.rows();
  const double n = static_cast<double>(t);
  NormalizedReturnPanel out;
  out.window_label = returns.window_label;
  out.dates = returns.dates;

  std::vector<Eigen::VectorXd> kept;
  for (std::size_t c = 0; c < returns.cols(); ++c) {
    auto column = returns.values.col(static_cast<Eigen::Index>(c));
    CompensatedSum sum;
    for (Eigen::Index r = 0; r < t; ++r) sum.add(column(r));
    const double mean = sum.value() / n;
    CompensatedSum squares;
    for (Eigen::Index r = 0; r < t; ++r) {
      double d = column(r) - mean;
      squares.add(d * d);
    }
    const double sigma = std::sqrt(squares.value() / n);
    if (!(sigma >= sigma_floor)) {
      out.excluded.push_back(returns.instruments[c]);
      continue;
    }
    Eigen::VectorXd z(t);
    for (Eigen::Index r = 0; r < t; ++r) z(r) = (column(r) - mean) / sigma;
    kept.push_back(std::move(z));
    out.instruments.push_back(returns.instruments[c]);
  }
  if (kept.empty()) throw Error(ErrorKind::AllExcluded, "every instrument has zero variance in window " + returns.window_label);

  out.values.resize(t, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) out.values.col(static_cast<Eigen::Index>(k)) = kept[k];
  return out;
}

}  // namespace corrnet
