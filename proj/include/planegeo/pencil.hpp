#pragma once

// Encoding the pencil of lines through a chart flag as a sampled map
// S^- -> S^+: tangent planes { ydot = (dy/dx) xdot } in R^4 = (x1,x2,y1,y2),
// converted to Gluck-Warner sphere pairs.

#include <Eigen/Dense>

#include "planegeo/chart_expr.hpp"
#include "planegeo/chart_geometry.hpp"
#include "planegeo/grassmann.hpp"

namespace planegeo {

inline SpherePair slope_plane_to_spheres(const Eigen::MatrixXd& slope) {
  // basis ((1,0), M e1), ((0,1), M e2) in coordinates (x1, x2, y1, y2)
  Eigen::Vector4d v1, v2;
  v1 << 1, 0, slope(0, 0), slope(1, 0);
  v2 << 0, 1, slope(0, 1), slope(1, 1);
  return plane_to_spheres(v1, v2);
}

// Sample directions X' = X0 + unit circle in line-parameter space.
inline ContractingField encode_pencil(const ChartExpr& c, const Eigen::VectorXd& x0,
                                      const Eigen::VectorXd& y0, const Eigen::VectorXd& X0,
                                      int samples) {
  if (c.n != 2) throw ChartError("pencil encoding needs a dim-2 chart");
  ContractingField f;
  f.provenance = ContractingField::Provenance::FromChart;
  for (int k = 0; k < samples; ++k) {
    double theta = 2.0 * M_PI * k / samples;
    Eigen::VectorXd Xline = X0;
    Xline(0) += std::cos(theta);
    Xline(1) += std::sin(theta);
    Eigen::MatrixXd slope = line_slope(c, x0, y0, Xline);
    SpherePair p = slope_plane_to_spheres(slope);
    f.samples.push_back({p.yminus, p.xplus});
  }
  return f;
}

}  // namespace planegeo
