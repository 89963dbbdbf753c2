#pragma once

// Static SVG line charts on a logarithmic x axis.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "traptail/errors.hpp"
#include "traptail/tail_table.hpp"

namespace traptail {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  int width = 900;
  int height = 520;
};

inline std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline void write_svg(std::ostream& os, const SvgChart& chart) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) throw DomainError("svg: series length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, std::log10(s.x[i]));
      x_hi = std::max(x_hi, std::log10(s.x[i]));
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!(x_hi >= x_lo)) throw EmptyInputError("svg: nothing to plot");
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  const double pad = y_hi > y_lo ? 0.05 * (y_hi - y_lo) : std::max(1e-12, 0.05 * std::abs(y_hi));
  y_lo -= pad;
  y_hi += pad;

  const double left = 90, right = 30, top = 50, bottom = 60;
  const double w = chart.width - left - right, h = chart.height - top - bottom;
  auto px = [&](double x) { return left + (std::log10(x) - x_lo) / (x_hi - x_lo) * w; };
  auto py = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * h; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << chart.width / 2 << "\" y=\"25\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(chart.title)
     << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(x_lo)); d <= static_cast<int>(std::floor(x_hi)); ++d) {
    const double x = left + (d - x_lo) / (x_hi - x_lo) * w;
    os << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\"" << top + h
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << top + h + 18 << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = y_lo + (y_hi - y_lo) * i / 4.0;
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << format_g17(y).substr(0, 10)
       << "</text>\n";
  }
  os << "<text x=\"" << left + w / 2 << "\" y=\"" << chart.height - 15 << "\" text-anchor=\"middle\">" << xml_escape(chart.x_label)
     << "</text>\n";
  os << "<text x=\"20\" y=\"" << top + h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << top + h / 2
     << ")\">" << xml_escape(chart.y_label) << "</text>\n";
  int legend = 0;
  for (const auto& s : chart.series) {
    os << "<polyline fill=\"none\" stroke=\"" << xml_escape(s.color) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    os << "\"/>\n";
    const double ly = top + 15 + 16 * legend++;
    os << "<line x1=\"" << left + w - 190 << "\" y1=\"" << ly << "\" x2=\"" << left + w - 165 << "\" y2=\"" << ly
       << "\" stroke=\"" << xml_escape(s.color) << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + w - 160 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace traptail
