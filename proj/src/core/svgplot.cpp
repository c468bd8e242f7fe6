#include "core/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/checkpoint.hpp"  // atomic_write_file

namespace bdbm {

namespace {

constexpr int kCanvas = 640;
constexpr double kMargin = 0.05;

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_scatter_svg(const std::vector<vec>& points) {
  if (points.empty()) throw ConfigError("scatter plot: no points");
  for (const auto& p : points) {
    if (p.size() != 2) throw ConfigError("scatter plot: points must be 2-dimensional");
    require(all_finite(p), "scatter plot: non-finite point");
  }
  double xmin = points[0][0], xmax = xmin, ymin = points[0][1], ymax = ymin;
  for (const auto& p : points) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  // degenerate extent still needs a nonzero scale
  double xspan = std::max(xmax - xmin, 1e-9);
  double yspan = std::max(ymax - ymin, 1e-9);
  xmin -= kMargin * xspan;
  xmax += kMargin * xspan;
  ymin -= kMargin * yspan;
  ymax += kMargin * yspan;
  xspan = xmax - xmin;
  yspan = ymax - ymin;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\""
     << kCanvas << "\" viewBox=\"0 0 " << kCanvas << " " << kCanvas << "\">\n"
     << "<rect width=\"" << kCanvas << "\" height=\"" << kCanvas << "\" fill=\"white\"/>\n";
  for (const auto& p : points) {
    double cx = (p[0] - xmin) / xspan * kCanvas;
    double cy = kCanvas - (p[1] - ymin) / yspan * kCanvas;  // y up
    os << "<circle cx=\"" << fmt2(cx) << "\" cy=\"" << fmt2(cy)
       << "\" r=\"2.5\" fill=\"#1f6fb2\" fill-opacity=\"0.7\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_scatter_svg(const std::string& path, const std::vector<vec>& points) {
  atomic_write_file(path, render_scatter_svg(points));
}

}  // namespace bdbm
