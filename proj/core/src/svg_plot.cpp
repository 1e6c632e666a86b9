#include "spb/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace spb {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (v > 0.0 && std::isfinite(v)) {
      lo = std::min(lo, std::log10(v));
      hi = std::max(hi, std::log10(v));
    }
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi == lo) hi = lo + 1.0;
  }
};

}  // namespace

std::string render_loglog_svg(const std::string& title, const std::string& xlabel,
                              const std::string& ylabel, const std::vector<PlotSeries>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
    for (double v : s.lo) yr.add(v);
    for (double v : s.hi) yr.add(v);
  }
  xr.finish();
  yr.finish();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - std::log10(y)) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  o << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw)
    << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(xr.lo); d <= static_cast<int>(xr.hi); ++d) {
    const double x = px(std::pow(10.0, d));
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x) << "\" y2=\""
      << fmt(kTop + ph) << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">1e"
      << d << "</text>\n";
  }
  for (int d = static_cast<int>(yr.lo); d <= static_cast<int>(yr.hi); ++d) {
    const double y = py(std::pow(10.0, d));
    o << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft + pw)
      << "\" y2=\"" << fmt(y) << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">1e" << d
      << "</text>\n";
  }
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 16)
    << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  o << "<text transform=\"translate(20," << fmt(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const PlotSeries& s = series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    const std::size_t m = std::min(s.x.size(), s.y.size());
    if (s.lo.size() == m && s.hi.size() == m && m > 0) {
      std::ostringstream pts;
      bool any = false;
      for (std::size_t k = 0; k < m; ++k) {
        if (s.x[k] > 0 && s.hi[k] > 0) pts << fmt(px(s.x[k])) << ',' << fmt(py(s.hi[k])) << ' ', any = true;
      }
      for (std::size_t k = m; k-- > 0;) {
        if (s.x[k] > 0 && s.lo[k] > 0) pts << fmt(px(s.x[k])) << ',' << fmt(py(s.lo[k])) << ' ';
      }
      if (any) {
        o << "<polygon points=\"" << pts.str() << "\" fill=\"" << color
          << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
      }
    }
    std::ostringstream pts;
    for (std::size_t k = 0; k < m; ++k) {
      if (s.x[k] > 0 && s.y[k] > 0 && std::isfinite(s.y[k])) {
        pts << fmt(px(s.x[k])) << ',' << fmt(py(s.y[k])) << ' ';
      }
    }
    o << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    const double ly = kTop + 16.0 + 20.0 * static_cast<double>(i);
    o << "<line x1=\"" << fmt(kWidth - kRight + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\""
      << fmt(kWidth - kRight + 40) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    o << "<text x=\"" << fmt(kWidth - kRight + 46) << "\" y=\"" << fmt(ly + 4) << "\">"
      << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace spb
