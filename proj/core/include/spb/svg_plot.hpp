#pragma once

#include <string>
#include <vector>

namespace spb {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;  // optional band, same length as y
  std::vector<double> hi;
  bool dashed = false;
};

// Log-log line plot. Non-positive points are dropped.
std::string render_loglog_svg(const std::string& title, const std::string& xlabel,
                              const std::string& ylabel, const std::vector<PlotSeries>& series);

}  // namespace spb
