#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "t2veval/correlation.hpp"
#include "t2veval/error.hpp"
#include "t2veval/regression.hpp"

using namespace t2veval;

TEST(Ranks, TiesShareMeanPosition) {
  const std::vector<double> v{10, 20, 20, 5};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Correlation, PerfectAndReversed) {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 6, 8, 10}, z{5, 4, 3, 2, 1};
  EXPECT_NEAR(spearman(x, y), 1.0, 1e-12);
  EXPECT_NEAR(kendall_tau_b(x, y), 1.0, 1e-12);
  EXPECT_NEAR(spearman(x, z), -1.0, 1e-12);
  EXPECT_NEAR(kendall_tau_b(x, z), -1.0, 1e-12);
}

TEST(Correlation, KendallWithTiesHandComputed) {
  // x = 1 1 2, y = 1 2 3: pairs (0,1) tie in x, (0,2) and (1,2) concordant.
  const std::vector<double> x{1, 1, 2}, y{1, 2, 3};
  EXPECT_NEAR(kendall_tau_b(x, y), 2.0 / std::sqrt(2.0 * 3.0), 1e-12);
}

TEST(Correlation, RejectsBadInput) {
  const std::vector<double> a{1, 2}, b{1, 2, 3}, c{1, 1, 1}, d{1, 2, 3}, one{1};
  EXPECT_THROW(spearman(a, b), Error);
  EXPECT_THROW(kendall_tau_b(c, d), Error);
  EXPECT_THROW(pearson(one, one), Error);
  const std::vector<double> nan{1, std::nan(""), 3};
  EXPECT_THROW(spearman(nan, d), Error);
}

TEST(Correlation, MatchesPairCountingOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> small(0, 6);
  std::normal_distribution<double> normal;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 5 + c % 60;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Every other case draws from a tiny range to force many ties.
      x[i] = c % 2 ? small(rng) : normal(rng);
      y[i] = c % 2 ? small(rng) : x[i] + normal(rng);
    }
    if (oracle::ranks(x) == std::vector<double>(n, (n + 1) / 2.0)) continue;
    if (oracle::ranks(y) == std::vector<double>(n, (n + 1) / 2.0)) continue;
    EXPECT_NEAR(spearman(x, y), oracle::spearman(x, y), 1e-9);
    EXPECT_NEAR(kendall_tau_b(x, y), oracle::kendall_tau_b(x, y), 1e-9);
  }
}

TEST(Ols, MatchesNormalEquations) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  for (int c = 0; c < 100; ++c) {
    const std::size_t p = 1 + c % 4, n = 10 + c;
    std::vector<std::vector<double>> rows(n, std::vector<double>(p));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : rows[i]) v = normal(rng);
      y[i] = normal(rng);
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
    const OlsFit fit = ols_fit(rows, y, names);
    const auto b = oracle::normal_equations(rows, y);
    EXPECT_NEAR(fit.intercept, b[0], 1e-9);
    for (std::size_t j = 0; j < p; ++j) EXPECT_NEAR(fit.coefficients[j], b[j + 1], 1e-9);
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) rss += std::pow(y[i] - fit.predict(rows[i]), 2);
    EXPECT_NEAR(fit.rss, rss, 1e-9);
  }
}

TEST(Ols, ExactRecoveryWithoutNoise) {
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    const double a = i * 0.1, b = std::sin(i);
    rows.push_back({a, b});
    y.push_back(0.7 * a + 0.3 * b + 0.05);
  }
  const OlsFit fit = ols_fit(rows, y, {"a", "b"});
  EXPECT_NEAR(fit.coefficients[0], 0.7, 1e-12);
  EXPECT_NEAR(fit.coefficients[1], 0.3, 1e-12);
  EXPECT_NEAR(fit.intercept, 0.05, 1e-12);
}

TEST(Ols, CollinearColumnsAreNamed) {
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) {
    rows.push_back({static_cast<double>(i), 2.0 * i});
    y.push_back(i);
  }
  try {
    ols_fit(rows, y, {"clip", "sd"});
    FAIL() << "expected a collinearity error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sd"), std::string::npos);
  }
}

TEST(Ols, TooFewSamples) {
  std::vector<std::vector<double>> rows{{1.0, 2.0}, {2.0, 1.0}};
  std::vector<double> y{1, 2};
  EXPECT_THROW(ols_fit(rows, y, {"a", "b"}), Error);
}
