#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "iwa/diagnostics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using testing_support::make_table;
using testing_support::random_table;

TEST(Vif, IndependentPredictorsNearOne) {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> a(200), b(200), y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    a[i] = g(rng);
    b[i] = g(rng);
    y[i] = a[i] + b[i] + g(rng);
  }
  const auto t = make_table({a, b}, y);
  const auto r = iwa::vif(t, t.labels);
  EXPECT_NEAR(r.at("x1"), 1.0, 0.3);
  EXPECT_NEAR(r.at("x2"), 1.0, 0.3);
  EXPECT_TRUE(r.flagged.empty());
}

TEST(Vif, TwoPredictorsShareOneOverOneMinusRSquared) {
  std::mt19937_64 rng(103);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + trial;
    std::vector<double> a(n), b(n), y(n);
    const double mix = 0.1 * (trial % 10);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = g(rng);
      b[i] = mix * a[i] + g(rng);
      y[i] = g(rng);
    }
    const auto t = make_table({a, b}, y);
    const auto r = iwa::vif(t, t.labels);
    const double r12 = oracle::correlation(a, b);
    const double want = 1.0 / (1.0 - r12 * r12);
    EXPECT_NEAR(r.values[0], r.values[1], 1e-9);
    EXPECT_NEAR(r.values[0], want, 1e-9 * want);
  }
}

TEST(Vif, OrthogonalPredictorsGiveOne) {
  // Centered, mutually orthogonal +-1 patterns over 8 rows.
  const std::vector<double> a = {1, -1, 1, -1, 1, -1, 1, -1};
  const std::vector<double> b = {1, 1, -1, -1, 1, 1, -1, -1};
  const std::vector<double> c = {1, 1, 1, 1, -1, -1, -1, -1};
  const auto t = make_table({a, b, c}, {1, 2, 3, 4, 5, 6, 7, 9});
  const auto r = iwa::vif(t, t.labels);
  for (double v : r.values) {
    EXPECT_GE(v, 1.0);
    EXPECT_LE(v, 1.0 + 1e-9);
  }
}

TEST(Vif, ThresholdIsInclusive) {
  EXPECT_TRUE(iwa::vif_flagged(iwa::vif_from_r2(0.8)));
  EXPECT_FALSE(iwa::vif_flagged(iwa::vif_from_r2(0.79)));
  EXPECT_NEAR(iwa::vif_from_r2(0.8), 5.0, 1e-12);
  EXPECT_TRUE(iwa::vif_flagged(5.0, 5.0));
  EXPECT_FALSE(iwa::vif_flagged(4.999999, 5.0));
}

TEST(Vif, LonePredictorIsOne) {
  const auto t = make_table({{1, 2, 3, 5}}, {1, 2, 3, 4});
  EXPECT_EQ(iwa::vif(t, t.labels).values, std::vector<double>{1.0});
}

TEST(Vif, PerfectCollinearityIsInfiniteAndFlagged) {
  const std::vector<double> a = {1, 2, 3, 4, 5, 7};
  std::vector<double> b;
  for (double v : a) b.push_back(2 * v + 1);
  const std::vector<double> c = {3, 1, 4, 1, 5, 9};
  const auto t = make_table({a, b, c}, {1, 2, 3, 4, 5, 6});
  const auto r = iwa::vif(t, t.labels);
  EXPECT_TRUE(std::isinf(r.at("x1")));
  EXPECT_TRUE(std::isinf(r.at("x2")));
  EXPECT_TRUE(r.is_flagged("x1"));
  EXPECT_TRUE(r.is_flagged("x2"));
}

TEST(Vif, ConstantPredictorDoesNotPoisonOthers) {
  const std::vector<double> a = {1, 2, 3, 4, 5, 7};
  const std::vector<double> b = {3, 1, 4, 1, 5, 9};
  const std::vector<double> zero(6, 0.0);
  const auto with = iwa::vif(make_table({a, b, zero}, {1, 2, 3, 4, 5, 6}), {"x1", "x2", "x3"});
  const auto without = iwa::vif(make_table({a, b}, {1, 2, 3, 4, 5, 6}), {"x1", "x2"});
  EXPECT_TRUE(std::isinf(with.at("x3")));
  EXPECT_NEAR(with.at("x1"), without.at("x1"), 1e-12);
  EXPECT_EQ(with.flagged, std::vector<std::string>{"x3"});
}

TEST(Vif, Errors) {
  const auto t = make_table({{1, 2, 3}, {2, 1, 3}}, {1, 2, 3});
  EXPECT_THROW(iwa::vif(t, {}), iwa::Error);
  EXPECT_THROW(iwa::vif(t, t.labels), iwa::Error);
  EXPECT_THROW(iwa::vif(make_table({{1, 2, 3, 4}}, {1, 2, 3, 4}), {"x1"}, 1.0), iwa::Error);
}

TEST(MultipleR, PerfectCorrelation) {
  const std::vector<double> x = {1, 4, 2, 8, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(3 * v);
  const auto e = iwa::multiple_r(make_table({x}, y), "x1");
  EXPECT_NEAR(e.r, 1.0, 1e-12);
  EXPECT_GT(e.slope, 0.0);
  ASSERT_EQ(e.scatter.size(), 5u);
  EXPECT_EQ(e.scatter[3], (iwa::Point{8, 24}));
}

TEST(MultipleR, MatchesCovarianceOracle) {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_table(rng, 5 + trial % 30, 1, 10.0);
    const auto e = iwa::multiple_r(t, "x1");
    EXPECT_NEAR(e.r, oracle::correlation(t.columns[0], t.response), 1e-9);
    EXPECT_LE(std::abs(e.r), 1.0);
    EXPECT_EQ(e.slope > 0, e.r > 0);
  }
}

TEST(MultipleR, IndependentNoiseIsSmall) {
  std::mt19937_64 rng(109);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(2000), y(2000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = g(rng);
    y[i] = g(rng);
  }
  const auto e = iwa::multiple_r(make_table({x}, y), "x1");
  EXPECT_LT(std::abs(e.r), 0.1);
  EXPECT_NEAR(e.r, oracle::correlation(x, y), 1e-9);
}

TEST(MultipleR, AffineInvarianceAndNegation) {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_table(rng, 20, 1, 3.0);
    const double base = iwa::multiple_r(t, "x1").r;
    auto scaled = t;
    for (double& v : scaled.columns[0]) v = 4.5 * v - 7.0;
    for (double& v : scaled.response) v = 0.25 * v + 100.0;
    EXPECT_NEAR(iwa::multiple_r(scaled, "x1").r, base, 1e-9);
    auto negated = t;
    for (double& v : negated.columns[0]) v = -v;
    EXPECT_NEAR(iwa::multiple_r(negated, "x1").r, -base, 1e-9);
  }
}

TEST(MultipleR, ConstantPredictorIsUndefined) {
  try {
    iwa::multiple_r(make_table({{2, 2, 2, 2}}, {1, 2, 3, 4}), "x1");
    FAIL();
  } catch (const iwa::Error& e) {
    EXPECT_EQ(e.kind(), iwa::ErrorKind::Domain);
  }
  EXPECT_THROW(iwa::multiple_r(make_table({{1, 2}}, {1, 2}), "x1"), iwa::Error);
}

TEST(RunsTest, AlternatingSignsHandComputed) {
  std::vector<double> e;
  for (int i = 0; i < 25; ++i) e.push_back(i % 2 == 0 ? 1.0 : -1.0);
  const auto s = iwa::runs_test(e);
  EXPECT_EQ(s.positives, 13u);
  EXPECT_EQ(s.negatives, 12u);
  EXPECT_EQ(s.runs, 25u);
  // mean 2*13*12/25 + 1, variance 2*13*12*(2*13*12 - 25) / (25^2 * 24)
  EXPECT_NEAR(s.expected_runs, 13.48, 1e-12);
  EXPECT_NEAR(s.z, 11.52 / std::sqrt(5.9696), 1e-12);
  EXPECT_EQ(s.verdict, iwa::RunsVerdict::Structured);
}

TEST(RunsTest, TwoBlocksAreStructured) {
  std::vector<double> e(20, 1.0);
  std::fill(e.begin() + 10, e.end(), -1.0);
  const auto s = iwa::runs_test(e);
  EXPECT_EQ(s.runs, 2u);
  EXPECT_LT(s.z, -2.0);
  EXPECT_FALSE(s.passes());
}

TEST(ResidualAnalysis, AlternatingResidualsFlagged) {
  std::vector<double> x, y;
  for (int i = 0; i < 24; ++i) {
    x.push_back(i);
    y.push_back(i + (i % 2 == 0 ? 1.0 : -1.0));
  }
  const auto t = make_table({x}, y);
  const auto f = iwa::fit(t, {{"x1"}});
  const auto ra = iwa::residual_analysis(f, t);
  EXPECT_EQ(ra.runs.runs, 24u);
  EXPECT_NEAR(ra.runs.z, (24.0 - 13.0) / std::sqrt(2.0 * 144 * (288 - 24) / (576.0 * 23)), 1e-9);
  EXPECT_EQ(ra.runs.verdict, iwa::RunsVerdict::Structured);
  ASSERT_EQ(ra.vs_predictor.size(), 1u);
  EXPECT_EQ(ra.vs_predictor[0].first, "x1");
  EXPECT_EQ(ra.vs_fitted.size(), 24u);
}

TEST(ResidualAnalysis, ExactFitIsDegenerate) {
  const auto t = make_table({{1, 2, 3, 4, 5, 6}}, {3, 5, 7, 9, 11, 13});
  const auto ra = iwa::residual_analysis(iwa::fit(t, {{"x1"}}), t);
  EXPECT_EQ(ra.runs.verdict, iwa::RunsVerdict::Degenerate);
  EXPECT_EQ(ra.runs.zeros, 6u);
  for (const auto& p : ra.vs_fitted) EXPECT_NEAR(p.y, 0.0, 1e-9);
}

TEST(ResidualAnalysis, MismatchedDataIsConsistencyError) {
  std::mt19937_64 rng(127);
  const auto t = random_table(rng, 15, 2);
  const auto other = random_table(rng, 15, 2);
  const auto f = iwa::fit(t, iwa::full_model(t));
  try {
    iwa::residual_analysis(f, other);
    FAIL();
  } catch (const iwa::Error& e) {
    EXPECT_EQ(e.kind(), iwa::ErrorKind::Consistency);
  }
  EXPECT_THROW(iwa::residual_analysis(f, t.slice(0, 10)), iwa::Error);
}

TEST(ResidualAnalysis, MonteCarloPassRateNearNinetyFivePercent) {
  std::mt19937_64 rng(131);
  int passed = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const auto t = random_table(rng, 40, 2, 1.0);
    const auto ra = iwa::residual_analysis(iwa::fit(t, iwa::full_model(t)), t);
    passed += ra.runs.passes();
  }
  const double rate = static_cast<double>(passed) / trials;
  EXPECT_NEAR(rate, 0.95, 0.03) << rate;
  RecordProperty("pass_rate", std::to_string(rate));
}
