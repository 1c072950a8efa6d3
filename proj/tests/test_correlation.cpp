#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "corrnet/correlation.hpp"
#include "corrnet/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace corrnet;

namespace {

NormalizedReturnPanel normalized_from(const Eigen::MatrixXd& returns) {
  ReturnPanel r;
  r.window_label = "w";
  r.values = returns;
  r.instruments = testing_helpers::labels(static_cast<std::size_t>(returns.cols()), "C");
  return normalize(r);
}

std::vector<double> col(const Eigen::MatrixXd& m, Eigen::Index c) {
  return std::vector<double>(m.col(c).data(), m.col(c).data() + m.rows());
}

}  // namespace

TEST(CorrelationMatrix, PerfectAndAnti) {
  Eigen::MatrixXd r(5, 3);
  r << 0.01, 0.01, -0.01,
       0.03, 0.03, -0.03,
      -0.02, -0.02, 0.02,
       0.00, 0.00, 0.00,
       0.05, 0.05, -0.05;
  auto c = correlation_matrix(normalized_from(r));
  EXPECT_NEAR(c(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(c(0, 2), -1.0, 1e-12);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(c(i, i), 1.0);
}

TEST(CorrelationMatrix, BivariateGaussianSample) {
  // rho = 0.6, T' = 260 returns, seed 2024; oracle: textbook Pearson on the same draws
  SynthSpec spec;
  spec.seed = 2024;
  spec.n_instruments = 2;
  spec.n_days = 261;
  spec.blocks = {{2, 0.6}};
  auto prices = generate(spec);
  auto returns = log_returns(prices);
  auto c = correlation_matrix(normalize(returns));
  const double expected = oracle::pearson(col(returns.values, 0), col(returns.values, 1));
  EXPECT_NEAR(c(0, 1), expected, 1e-12);
  EXPECT_NEAR(c(0, 1), 0.6, 0.12);
}

TEST(CorrelationMatrix, MatchesNaivePearson) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 0.02);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd r(20, 5);
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = g(rng) + (j > 0 ? 0.5 * r(i, j - 1) : 0.0);
    auto c = correlation_matrix(normalized_from(r));
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 5; ++j) {
        double ref = i == j ? 1.0 : oracle::pearson(col(r, i), col(r, j));
        EXPECT_NEAR(c(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), ref, 1e-12);
      }
  }
}

TEST(CorrelationMatrix, SymmetryDiagonalRange) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd r(100, 8);
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = g(rng);
  auto n = normalized_from(r);
  auto c = correlation_matrix(n);
  EXPECT_TRUE((c.values.array() == c.values.transpose().array()).all());
  EXPECT_LE(c.values.maxCoeff(), 1.0);
  EXPECT_GE(c.values.minCoeff(), -1.0);
  for (std::size_t i = 0; i < n.cols(); ++i) EXPECT_NEAR(cross_moment(n, i, i), 1.0, 1e-9);
}

TEST(CorrelationMatrix, PermutationConsistent) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd r(60, 6);
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = g(rng) + 0.3 * (j % 2 ? r(i, 0) : 0.0);
  std::vector<Eigen::Index> perm{3, 0, 5, 1, 4, 2};
  Eigen::MatrixXd p(r.rows(), r.cols());
  for (std::size_t k = 0; k < perm.size(); ++k) p.col(static_cast<Eigen::Index>(k)) = r.col(perm[k]);
  auto a = correlation_matrix(normalized_from(r));
  auto b = correlation_matrix(normalized_from(p));
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = 0; j < perm.size(); ++j)
      EXPECT_EQ(b(i, j), a(static_cast<std::size_t>(perm[i]), static_cast<std::size_t>(perm[j])));
  EXPECT_NEAR(mean_correlation(a), mean_correlation(b), 1e-15);
}

TEST(CorrelationMatrix, TooFewInstruments) {
  Eigen::MatrixXd r(5, 2);
  r << 0.01, 0, 0.02, 0, 0.03, 0, 0.01, 0, 0.02, 0;
  try {
    correlation_matrix(normalized_from(r));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewInstruments);
  }
}

TEST(MeanCorrelation, Examples) {
  Eigen::MatrixXd two(2, 2);
  two << 1, 0.4, 0.4, 1;
  EXPECT_DOUBLE_EQ(mean_correlation(testing_helpers::corr_from(two)), 0.4);
  EXPECT_EQ(mean_correlation(testing_helpers::corr_from(Eigen::MatrixXd::Identity(4, 4))), 0.0);
  Eigen::MatrixXd three(3, 3);
  three << 1, 0.1, 0.2, 0.1, 1, 0.3, 0.2, 0.3, 1;
  EXPECT_NEAR(mean_correlation(testing_helpers::corr_from(three)), 0.2, 1e-15);
}
