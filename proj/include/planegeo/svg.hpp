#pragma once

// Minimal standalone SVG output: conic outlines, orbit polygons, and margin
// heatmap rasters, with the viewbox fitted to the drawn geometry.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "planegeo/conic.hpp"
#include "planegeo/report.hpp"

namespace planegeo {

struct UnplottableResult : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SvgCanvas {
 public:
  void add_polyline(const std::vector<std::pair<double, double>>& pts,
                    const std::string& color, double width, bool closed = false) {
    if (pts.empty()) return;
    std::string d = "M";
    for (auto& [x, y] : pts) {
      d += " " + format_double(x) + " " + format_double(-y);
      extend(x, -y);
    }
    if (closed) d += " Z";
    body_ += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
             format_double(width) + "\"/>\n";
  }

  // trace a real conic by marching the intersection with radial rays from its
  // center (works for ellipses; other real conics are sampled per-branch)
  void add_conic(const Conic<double>& Q, const std::string& color, double width) {
    std::vector<std::pair<double, double>> pts;
    try {
      Eigen::Vector3d c = Q.adjugate() * Eigen::Vector3d(0, 0, 1);
      if (std::abs(c(2)) < 1e-12) throw ConicError("no affine center");
      Hom<double> center = Hom<double>::of(c(0), c(1), c(2));
      for (int k = 0; k <= 256; ++k) {
        double th = 2 * M_PI * k / 256;
        Hom<double> dir = Hom<double>::of(std::cos(th), std::sin(th), 0);
        auto hits = line_conic_intersect(Q, join(center, dir));
        // pick the hit on the +direction side
        for (auto& h : hits) {
          auto v = h.normalized().v;
          if (std::abs(v(2)) < 1e-12) continue;
          double dx = v(0) / v(2) - c(0) / c(2), dy = v(1) / v(2) - c(1) / c(2);
          if (dx * std::cos(th) + dy * std::sin(th) > 0) {
            pts.push_back({v(0) / v(2), v(1) / v(2)});
            break;
          }
        }
      }
    } catch (const ConicError&) {
      throw UnplottableResult("conic has no drawable real locus");
    }
    if (pts.size() < 8) throw UnplottableResult("conic has no drawable real locus");
    add_polyline(pts, color, width);
  }

  void add_annotation(double x, double y, const std::string& text) {
    body_ += "<text x=\"" + format_double(x) + "\" y=\"" + format_double(-y) +
             "\" font-size=\"0.08\" fill=\"#333\">" + text + "</text>\n";
    extend(x, -y);
  }

  // raster heatmap: values[i][j] over [x0,x1]x[y0,y1], grayscale by range
  void add_heatmap(const std::vector<std::vector<double>>& values, double x0, double y0,
                   double x1, double y1) {
    if (values.empty() || values[0].empty()) throw UnplottableResult("empty heatmap");
    double lo = values[0][0], hi = lo;
    for (auto& row : values)
      for (double v : row) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    double span = hi > lo ? hi - lo : 1.0;
    size_t nr = values.size(), nc = values[0].size();
    double dx = (x1 - x0) / nc, dy = (y1 - y0) / nr;
    for (size_t i = 0; i < nr; ++i)
      for (size_t j = 0; j < nc; ++j) {
        int g = (int)std::lround(255 * (values[i][j] - lo) / span);
        std::ostringstream col;
        col << "rgb(" << g << "," << g << "," << 255 - g << ")";
        double px = x0 + j * dx, py = -(y0 + (i + 1) * dy);
        body_ += "<rect x=\"" + format_double(px) + "\" y=\"" + format_double(py) +
                 "\" width=\"" + format_double(dx) + "\" height=\"" + format_double(dy) +
                 "\" fill=\"" + col.str() + "\"/>\n";
        extend(px, py);
        extend(px + dx, py + dy);
      }
  }

  std::string str() const {
    if (body_.empty()) throw UnplottableResult("nothing to plot");
    double pad = 0.05 * std::max(maxx_ - minx_, maxy_ - miny_) + 0.01;
    std::string vb = format_double(minx_ - pad) + " " + format_double(miny_ - pad) + " " +
                     format_double(maxx_ - minx_ + 2 * pad) + " " +
                     format_double(maxy_ - miny_ + 2 * pad);
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + vb +
           "\" width=\"640\" height=\"640\">\n" + body_ + "</svg>\n";
  }

 private:
  void extend(double x, double y) {
    minx_ = std::min(minx_, x);
    maxx_ = std::max(maxx_, x);
    miny_ = std::min(miny_, y);
    maxy_ = std::max(maxy_, y);
  }
  std::string body_;
  double minx_ = 1e300, maxx_ = -1e300, miny_ = 1e300, maxy_ = -1e300;
};

}  // namespace planegeo
