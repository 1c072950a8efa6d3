#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "corrnet/date.hpp"
#include "corrnet/error.hpp"
#include "corrnet/ingest.hpp"

namespace corrnet {

struct Block {
  std::size_t members = 0;
  double rho_in = 0.0;
};

/// From `window * window_length` returns onward, the alternate block
/// structure replaces the base one.
struct RegimeSwitch {
  std::size_t window = 0;
  std::size_t window_length = 260;
  std::vector<Block> blocks;
  std::optional<double> cross_correlation;  // defaults to the base rho_out
};

struct SynthSpec {
  std::uint64_t seed = 1;
  std::size_t n_instruments = 0;
  std::size_t n_days = 0;  // price rows, one per business day
  std::vector<Block> blocks;
  double cross_correlation = 0.0;
  double daily_vol = 0.01;
  double start_price = 100.0;
  Date start_date{2000, 1, 3};
  std::vector<std::string> labels;  // empty: I00, I01, ...
  std::optional<RegimeSwitch> regime_switch;

  std::vector<std::string> instrument_labels() const {
    if (!labels.empty()) return labels;
    const int width = n_instruments > 100 ? 3 : 2;
    std::vector<std::string> out;
    for (std::size_t k = 0; k < n_instruments; ++k) {
      std::string digits = std::to_string(k);
      out.push_back("I" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0') + digits);
    }
    return out;
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, "synth spec: " + m); };
    if (n_instruments < 1) fail("n_instruments must be >= 1");
    if (n_days < 2) fail("n_days must be >= 2");
    if (!(daily_vol > 0.0)) fail("daily_vol must be > 0");
    if (!(start_price > 0.0)) fail("start_price must be > 0");
    if (!(cross_correlation >= -1.0 && cross_correlation <= 1.0)) fail("cross_correlation must lie in [-1, 1]");
    auto check_blocks = [&](const std::vector<Block>& bs, const char* what) {
      std::size_t total = 0;
      for (const auto& b : bs) {
        if (b.members == 0) fail(std::string(what) + ": empty block");
        if (!(b.rho_in >= -1.0 && b.rho_in <= 1.0)) fail(std::string(what) + ": rho_in must lie in [-1, 1]");
        total += b.members;
      }
      if (total != n_instruments) fail(std::string(what) + ": block members must sum to n_instruments");
    };
    check_blocks(blocks, "blocks");
    if (regime_switch) {
      check_blocks(regime_switch->blocks, "regime_switch.blocks");
      if (regime_switch->window_length < 1) fail("regime_switch.window_length must be >= 1");
      if (regime_switch->cross_correlation &&
          !(*regime_switch->cross_correlation >= -1.0 && *regime_switch->cross_correlation <= 1.0))
        fail("regime_switch.cross_correlation must lie in [-1, 1]");
    }
    if (!labels.empty()) {
      if (labels.size() != n_instruments) fail("labels must list n_instruments entries");
      std::set<std::string> unique(labels.begin(), labels.end());
      if (unique.size() != labels.size()) fail("labels must be unique");
      if (unique.count("")) fail("labels must be non-empty");
    }
  }
};

/// Unit-diagonal matrix: rho_in inside a block, rho_out across blocks.
/// Blocks occupy consecutive instruments in list order.
inline Eigen::MatrixXd block_correlation(const std::vector<Block>& blocks, double rho_out) {
  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < blocks.size(); ++b) block_of.insert(block_of.end(), blocks[b].members, b);
  const auto n = static_cast<Eigen::Index>(block_of.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      auto bi = block_of[static_cast<std::size_t>(i)], bj = block_of[static_cast<std::size_t>(j)];
      c(i, j) = i == j ? 1.0 : (bi == bj ? blocks[bi].rho_in : rho_out);
    }
  return c;
}

/// Lower-triangular L with L L^T = a, for positive semi-definite `a`. Pivots
/// within `tolerance` of zero yield a zero column (rank-deficient but PSD);
/// a pivot below -tolerance means `a` is not PSD.
inline Eigen::MatrixXd cholesky_psd(const Eigen::MatrixXd& a, double tolerance = 1e-10) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (pivot < -tolerance) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
      throw Error(ErrorKind::NotPositiveSemidefinite,
                  "correlation matrix is not positive semi-definite (smallest eigenvalue " +
                      std::to_string(eig.eigenvalues().minCoeff()) + ")");
    }
    if (pivot <= tolerance) continue;
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  // a zero pivot is only consistent with PSD if the residual column vanishes too
  Eigen::MatrixXd residual = a - l * l.transpose();
  if (residual.cwiseAbs().maxCoeff() > 1e-8) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    throw Error(ErrorKind::NotPositiveSemidefinite,
                "correlation matrix is not positive semi-definite (smallest eigenvalue " +
                    std::to_string(eig.eigenvalues().minCoeff()) + ")");
  }
  return l;
}

/// Standard normals from std::mt19937_64 via the Box-Muller transform. Both
/// variates of each pair are used, cosine branch first. Uniforms take the top
/// 53 bits of each draw and map them onto (0, 1].
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (spare_) {
      double z = *spare_;
      spare_.reset();
      return z;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

 private:
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Business-day (Mon-Fri) calendar of `count` dates starting at the first
/// weekday on or after `start`.
inline std::vector<Date> business_days(Date start, std::size_t count) {
  std::vector<Date> out;
  out.reserve(count);
  Date d = start;
  while (out.size() < count) {
    if (!d.is_weekend()) out.push_back(d);
    d = d.plus_days(1);
  }
  return out;
}

/// Log-normal price panel with block-correlated Gaussian returns.
inline PricePanel generate(const SynthSpec& spec) {
  spec.validate();
  const Eigen::MatrixXd base = cholesky_psd(block_correlation(spec.blocks, spec.cross_correlation));
  std::optional<Eigen::MatrixXd> alternate;
  std::size_t switch_row = spec.n_days;
  if (spec.regime_switch) {
    const auto& rs = *spec.regime_switch;
    alternate = cholesky_psd(block_correlation(rs.blocks, rs.cross_correlation.value_or(spec.cross_correlation)));
    switch_row = rs.window * rs.window_length;
  }

  const auto n = static_cast<Eigen::Index>(spec.n_instruments);
  const auto rows = static_cast<Eigen::Index>(spec.n_days);
  PricePanel panel;
  panel.dates = business_days(spec.start_date, spec.n_days);
  for (const auto& label : spec.instrument_labels()) panel.instruments.emplace_back(label);
  panel.closes.resize(rows, n);
  panel.filled.setConstant(rows, n, false);

  NormalStream normals(spec.seed);
  Eigen::VectorXd log_price = Eigen::VectorXd::Constant(n, std::log(spec.start_price));
  Eigen::VectorXd z(n);
  panel.closes.row(0) = log_price.array().exp().transpose();
  for (Eigen::Index t = 1; t < rows; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normals.next();
    const Eigen::MatrixXd& l = (alternate && static_cast<std::size_t>(t) >= switch_row) ? *alternate : base;
    // row-by-row product keeps the summation order fixed
    for (Eigen::Index i = 0; i < n; ++i) {
      double x = 0.0;
      for (Eigen::Index k = 0; k <= i; ++k) x += l(i, k) * z(k);
      log_price(i) += spec.daily_vol * x;
    }
    panel.closes.row(t) = log_price.array().exp().transpose();
  }
  return panel;
}

namespace detail {

inline std::vector<Block> blocks_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::Config, std::string("synth spec: ") + what + " must be an array");
  std::vector<Block> out;
  for (const auto& b : j) {
    if (b.is_array() && b.size() == 2) out.push_back({b[0].get<std::size_t>(), b[1].get<double>()});
    else if (b.is_object()) out.push_back({b.at("members").get<std::size_t>(), b.at("rho_in").get<double>()});
    else throw Error(ErrorKind::Config, std::string("synth spec: malformed entry in ") + what);
  }
  return out;
}

}  // namespace detail

/// Reads a SynthSpec from JSON. Blocks are `{"members": 10, "rho_in": 0.6}`
/// objects or `[10, 0.6]` pairs.
inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  try {
    SynthSpec s;
    s.seed = j.value("seed", std::uint64_t{1});
    s.n_days = j.at("n_days").get<std::size_t>();
    s.blocks = detail::blocks_from_json(j.at("blocks"), "blocks");
    std::size_t members = 0;
    for (const auto& b : s.blocks) members += b.members;
    s.n_instruments = j.value("n_instruments", members);
    s.cross_correlation = j.value("cross_correlation", 0.0);
    s.daily_vol = j.value("daily_vol", 0.01);
    s.start_price = j.value("start_price", 100.0);
    if (j.contains("start_date")) {
      auto d = Date::parse(j.at("start_date").get<std::string>());
      if (!d) throw Error(ErrorKind::Config, "synth spec: start_date must be YYYY-MM-DD");
      s.start_date = *d;
    }
    if (j.contains("labels")) s.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("regime_switch") && !j.at("regime_switch").is_null()) {
      const auto& r = j.at("regime_switch");
      RegimeSwitch rs;
      rs.window = r.at("window").get<std::size_t>();
      rs.window_length = r.value("window_length", std::size_t{260});
      rs.blocks = detail::blocks_from_json(r.at("blocks"), "regime_switch.blocks");
      if (r.contains("cross_correlation")) rs.cross_correlation = r.at("cross_correlation").get<double>();
      s.regime_switch = rs;
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("synth spec: ") + e.what());
  }
}

}  // namespace corrnet
