#include <gtest/gtest.h>

#include <cmath>

#include "corrnet/corrnet.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace corrnet;

namespace {

std::vector<double> col(const Eigen::MatrixXd& m, Eigen::Index c) {
  return std::vector<double>(m.col(c).data(), m.col(c).data() + m.rows());
}

// Mean absolute deviation of the sample correlation from the planted one,
// over all off-diagonal pairs.
double recovery_error(std::uint64_t seed, std::size_t days) {
  SynthSpec s;
  s.seed = seed;
  s.n_instruments = 6;
  s.n_days = days + 1;
  s.blocks = {{3, 0.7}, {3, 0.4}};
  s.cross_correlation = 0.2;
  Eigen::MatrixXd target = block_correlation(s.blocks, s.cross_correlation);
  auto corr = correlation_matrix(normalize(log_returns(generate(s))));
  return (corr.values - target).cwiseAbs().sum() / 30.0;
}

}  // namespace

TEST(Synth, PerfectCorrelationGivesIdenticalColumns) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    SynthSpec s;
    s.seed = seed;
    s.n_instruments = 2;
    s.n_days = 100;
    s.blocks = {{2, 1.0}};
    auto r = log_returns(generate(s));
    EXPECT_LT((r.values.col(0) - r.values.col(1)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Synth, IndependentBlocksUncorrelated) {
  SynthSpec s;
  s.seed = 5;
  s.n_instruments = 4;
  s.n_days = 5001;
  s.blocks = {{2, 0.5}, {2, 0.5}};
  s.cross_correlation = 0.0;
  auto r = log_returns(generate(s));
  for (Eigen::Index i : {0, 1})
    for (Eigen::Index j : {2, 3}) EXPECT_NEAR(oracle::pearson(col(r.values, i), col(r.values, j)), 0.0, 0.05);
}

TEST(Synth, DeterministicAndPositive) {
  auto spec = testing_helpers::two_block_spec(77);
  auto a = io::prices_wide_csv(generate(spec));
  auto b = io::prices_wide_csv(generate(spec));
  EXPECT_EQ(a, b);
  auto other = spec;
  other.seed = 78;
  EXPECT_NE(a, io::prices_wide_csv(generate(other)));
  EXPECT_GT(generate(spec).closes.minCoeff(), 0.0);
}

TEST(Synth, NormalStreamMoments) {
  NormalStream z(123);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    double v = z.next();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Synth, NonPsdRejected) {
  SynthSpec s;
  s.n_instruments = 3;
  s.n_days = 10;
  s.blocks = {{1, 0.0}, {1, 0.0}, {1, 0.0}};
  s.cross_correlation = -0.9;  // smallest eigenvalue 1 - 2*0.9 < 0
  try {
    generate(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositiveSemidefinite);
    EXPECT_NE(std::string(e.what()).find("-0.8"), std::string::npos);
  }
}

TEST(Synth, CholeskyReconstructs) {
  Eigen::MatrixXd c = block_correlation({{4, 0.6}, {3, 0.3}, {2, 1.0}}, 0.1);
  Eigen::MatrixXd l = cholesky_psd(c);
  EXPECT_LT((l * l.transpose() - c).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Synth, ConvergenceRate) {
  // averaged over seeds, error at T = 2600 is about sqrt(10) smaller than at T = 260
  double small = 0, large = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    small += recovery_error(seed, 260);
    large += recovery_error(seed, 2600);
  }
  const double ratio = small / large;
  EXPECT_GT(ratio, std::sqrt(10.0) / 1.5);
  EXPECT_LT(ratio, std::sqrt(10.0) * 1.5);
}

TEST(Synth, SpecValidation) {
  SynthSpec s;
  s.n_instruments = 3;
  s.n_days = 10;
  s.blocks = {{2, 0.5}};
  EXPECT_THROW(s.validate(), Error);
  s.blocks = {{3, 0.5}};
  s.daily_vol = 0.0;
  EXPECT_THROW(s.validate(), Error);
}

TEST(Synth, JsonSpec) {
  auto j = nlohmann::json::parse(R"({
    "seed": 9, "n_days": 300, "blocks": [{"members": 2, "rho_in": 0.5}, [3, 0.7]],
    "cross_correlation": 0.1, "daily_vol": 0.02, "labels": ["A","B","C","D","E"],
    "regime_switch": {"window": 1, "window_length": 100, "blocks": [[5, 0.4]]}
  })");
  auto s = synth_spec_from_json(j);
  EXPECT_EQ(s.n_instruments, 5u);
  EXPECT_EQ(s.blocks[1].members, 3u);
  ASSERT_TRUE(s.regime_switch);
  EXPECT_EQ(s.regime_switch->window_length, 100u);
  auto p = generate(s);
  EXPECT_EQ(p.instruments[4].label, "E");
  EXPECT_THROW(synth_spec_from_json(nlohmann::json::parse(R"({"blocks": [[2, 0.5]]})")), Error);
}

TEST(Synth, TwoBlockRecoveryRate) {
  // measured once over seeds 1..100 (100/100) and frozen
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto corr = correlation_matrix(normalize(log_returns(generate(testing_helpers::two_block_spec(seed)))));
    if (testing_helpers::splits_into_two_blocks(corr, 0.3)) ++hits;
  }
  std::cout << "two-block recovery: " << hits << "/100\n";
  EXPECT_GE(hits, 100);
}

TEST(Synth, RegimeSwitchFlagged) {
  for (std::size_t k : {3u, 5u}) {
    auto clusters = testing_helpers::window_clusters(generate(testing_helpers::two_regime_spec(31, k)), 260, 0.3);
    ASSERT_EQ(clusters.size(), 8u);
    auto flags = regime_flags(similarity_matrix(clusters), 0.5);
    ASSERT_EQ(flags.size(), 1u);
    EXPECT_EQ(flags[0].window_label, clusters[k].window_label);
  }
}
