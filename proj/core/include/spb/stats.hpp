#pragma once

#include <vector>

namespace spb {

// Linear interpolation between order statistics: position p * (N - 1).
double quantile_linear(std::vector<double> values, double p);
double mean(const std::vector<double>& values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit ordinary_least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spb
