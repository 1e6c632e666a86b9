#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spb/errors.hpp"
#include "spb/stats.hpp"

using namespace spb;

TEST(Quantile, SingleValue) {
  for (double p : {0.0, 0.05, 0.5, 0.95, 1.0}) EXPECT_EQ(quantile_linear({3.25}, p), 3.25);
}

TEST(Quantile, OneToHundred) {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);
  EXPECT_NEAR(quantile_linear(v, 0.05), 5.95, 1e-12);
  EXPECT_NEAR(quantile_linear(v, 0.5), 50.5, 1e-12);
  EXPECT_NEAR(quantile_linear(v, 0.95), 95.05, 1e-12);
}

TEST(Quantile, MatchesOrderStatisticOracle) {
  const oracle::Matrix g = oracle::gaussian(37, 1, 4);
  const std::vector<double> v(g.data(), g.data() + g.size());
  for (double p = 0.0; p <= 1.0; p += 0.0625) {
    EXPECT_NEAR(quantile_linear(v, p), oracle::quantile_type7(v, p), 1e-14);
  }
}

TEST(Quantile, Errors) {
  EXPECT_THROW(quantile_linear({}, 0.5), PreconditionError);
  EXPECT_THROW(quantile_linear({1.0}, 1.5), PreconditionError);
  EXPECT_THROW(quantile_linear({1.0}, -0.1), PreconditionError);
}

TEST(Mean, Basic) { EXPECT_DOUBLE_EQ(mean({1.0, 2.0, 6.0}), 3.0); }

TEST(Ols, ExactPowerLaw) {
  std::vector<double> x, y;
  for (double n : {256.0, 512.0, 1024.0, 2048.0, 4096.0}) {
    x.push_back(std::log(n));
    y.push_back(std::log(std::pow(n, -0.75)));
  }
  const LineFit f = ordinary_least_squares(x, y);
  EXPECT_NEAR(f.slope, -0.75, 1e-10);
  EXPECT_NEAR(f.intercept, 0.0, 1e-9);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}
