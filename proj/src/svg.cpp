// SPDX-License-Identifier: Apache-2.0
#include "pvlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pvlab {

namespace {

struct Mapper {
  double lx0, lx1, ly0, ly1;
  double px0 = 70, px1 = 600, py0 = 420, py1 = 40;
  double x(double v) const {
    return px0 + (std::log10(v) - lx0) / (lx1 - lx0) * (px1 - px0);
  }
  double y(double v) const {
    return py0 + (std::log10(v) - ly0) / (ly1 - ly0) * (py1 - py0);
  }
};

}  // namespace

std::string svg_loglog_plot(const std::vector<double>& x,
                            const std::vector<double>& y,
                            const std::vector<double>& yerr, double slope,
                            double intercept, const std::string& title,
                            const std::string& xlabel,
                            const std::string& ylabel) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xmin = std::min(xmin, x[i]);
    xmax = std::max(xmax, x[i]);
    double lo = y[i], hi = y[i];
    if (i < yerr.size()) {
      lo = std::max(1e-300, y[i] - yerr[i]);
      hi = y[i] + yerr[i];
    }
    ymin = std::min(ymin, lo);
    ymax = std::max(ymax, hi);
  }
  Mapper m{std::log10(xmin) - 0.05, std::log10(xmax) + 0.05,
           std::log10(ymin) - 0.1, std::log10(ymax) + 0.1};

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='480' "
        "viewBox='0 0 640 480'>\n"
     << "<rect width='640' height='480' fill='white'/>\n"
     << "<text x='320' y='24' text-anchor='middle' font-size='15' "
        "font-family='sans-serif'>" << title << "</text>\n";

  // axes
  os << "<line x1='" << m.px0 << "' y1='" << m.py0 << "' x2='" << m.px1
     << "' y2='" << m.py0 << "' stroke='black'/>\n";
  os << "<line x1='" << m.px0 << "' y1='" << m.py0 << "' x2='" << m.px0
     << "' y2='" << m.py1 << "' stroke='black'/>\n";
  os << "<text x='" << 0.5 * (m.px0 + m.px1)
     << "' y='460' text-anchor='middle' font-size='12' "
        "font-family='sans-serif'>log10 " << xlabel << "</text>\n";
  os << "<text x='16' y='" << 0.5 * (m.py0 + m.py1)
     << "' text-anchor='middle' font-size='12' font-family='sans-serif' "
        "transform='rotate(-90 16 " << 0.5 * (m.py0 + m.py1) << ")'>log10 "
     << ylabel << "</text>\n";

  // decade ticks
  for (int e = int(std::floor(m.lx0)); e <= int(std::ceil(m.lx1)); ++e) {
    double v = std::pow(10.0, e);
    if (std::log10(v) < m.lx0 || std::log10(v) > m.lx1) continue;
    os << "<line x1='" << m.x(v) << "' y1='" << m.py0 << "' x2='" << m.x(v)
       << "' y2='" << m.py0 + 5 << "' stroke='black'/>\n"
       << "<text x='" << m.x(v) << "' y='" << m.py0 + 18
       << "' text-anchor='middle' font-size='10' "
          "font-family='sans-serif'>1e" << e << "</text>\n";
  }
  for (int e = int(std::floor(m.ly0)); e <= int(std::ceil(m.ly1)); ++e) {
    double v = std::pow(10.0, e);
    if (std::log10(v) < m.ly0 || std::log10(v) > m.ly1) continue;
    os << "<line x1='" << m.px0 - 5 << "' y1='" << m.y(v) << "' x2='" << m.px0
       << "' y2='" << m.y(v) << "' stroke='black'/>\n"
       << "<text x='" << m.px0 - 8 << "' y='" << m.y(v) + 3
       << "' text-anchor='end' font-size='10' font-family='sans-serif'>1e"
       << e << "</text>\n";
  }

  // fitted power law
  double fy0 = std::exp(intercept + slope * std::log(xmin));
  double fy1 = std::exp(intercept + slope * std::log(xmax));
  os << "<line x1='" << m.x(xmin) << "' y1='" << m.y(fy0) << "' x2='"
     << m.x(xmax) << "' y2='" << m.y(fy1)
     << "' stroke='#1f77b4' stroke-width='1.5'/>\n";

  // points with error bars
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i < yerr.size() && yerr[i] > 0) {
      double lo = std::max(1e-300, y[i] - yerr[i]), hi = y[i] + yerr[i];
      os << "<line x1='" << m.x(x[i]) << "' y1='" << m.y(lo) << "' x2='"
         << m.x(x[i]) << "' y2='" << m.y(hi)
         << "' stroke='#d62728' stroke-width='1'/>\n";
    }
    os << "<circle cx='" << m.x(x[i]) << "' cy='" << m.y(y[i])
       << "' r='3.5' fill='#d62728'/>\n";
  }

  std::ostringstream lbl;
  lbl.precision(4);
  lbl << "slope " << slope;
  os << "<text x='" << m.px1 - 8 << "' y='" << m.py1 + 14
     << "' text-anchor='end' font-size='12' font-family='sans-serif'>"
     << lbl.str() << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace pvlab
