#pragma once

// Nondegenerate-coordinate geometry of a chart Y = Y(x, y, X):
// implicit solve for y(x, X, Y), the tableau t^i_{jk}, regularity margins
// and grid scans, plus the dual-chart tableau.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "planegeo/chart_expr.hpp"
#include "planegeo/tableau.hpp"
#include "planegeo/triality.hpp"

namespace planegeo {

struct SingularJacobian : ChartError {
  SingularJacobian() : ChartError("dY/dy singular: chart degenerate at this flag") {}
};
struct NoConvergence : ChartError {
  double best_residual;
  explicit NoConvergence(double r)
      : ChartError("Newton iteration did not converge (best residual " + std::to_string(r) + ")"),
        best_residual(r) {}
};

namespace detail {

struct ChartPartials {
  Eigen::VectorXd Y;               // value of the chart functions
  Eigen::MatrixXd dY_dx, dY_dy, dY_dX;
};

inline ChartPartials chart_first_partials(const ChartExpr& c, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y, const Eigen::VectorXd& X) {
  int n = c.n;
  auto jets = c.eval(x, y, X);
  ChartPartials p;
  p.Y.resize(n);
  p.dY_dx.resize(n, n);
  p.dY_dy.resize(n, n);
  p.dY_dX.resize(n, n);
  for (int i = 0; i < n; ++i) {
    p.Y(i) = jets[i].v;
    for (int j = 0; j < n; ++j) {
      p.dY_dx(i, j) = jets[i].g(j);
      p.dY_dy(i, j) = jets[i].g(n + j);
      p.dY_dX(i, j) = jets[i].g(2 * n + j);
    }
  }
  return p;
}

}  // namespace detail

// Newton iteration on G(y) = Y(x, y, X) - Ytarget with the AD Jacobian.
inline Eigen::VectorXd solve_y(const ChartExpr& c, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& X, const Eigen::VectorXd& Ytarget,
                               const Eigen::VectorXd& guess) {
  Eigen::VectorXd y = guess;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    auto p = detail::chart_first_partials(c, x, y, X);
    Eigen::VectorXd G = p.Y - Ytarget;
    best = std::min(best, G.norm());
    if (G.norm() < 1e-12) return y;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(p.dY_dy);
    if (!lu.isInvertible()) throw SingularJacobian();
    y -= lu.solve(G);
  }
  auto p = detail::chart_first_partials(c, x, y, X);
  if ((p.Y - Ytarget).norm() < 1e-12) return y;
  throw NoConvergence(std::min(best, (p.Y - Ytarget).norm()));
}

struct ChartJet {
  Eigen::VectorXd x, y, X, Y;
  Eigen::MatrixXd dy_dx, dy_dX, dy_dY;  // solved partials
  Eigen::MatrixXd h;                    // inverse of dy/dY (= dY/dy)
  Tableau3 tableau;
};

namespace detail {

struct ImplicitFirst {
  Eigen::MatrixXd dy_dx, dy_dX, dy_dY;
};

// First partials of the solved map y(x, X, Y) by the implicit function theorem.
inline ImplicitFirst implicit_first(const ChartExpr& c, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y, const Eigen::VectorXd& X) {
  auto p = chart_first_partials(c, x, y, X);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(p.dY_dy);
  if (!lu.isInvertible()) throw SingularJacobian();
  ImplicitFirst f;
  f.dy_dx = -lu.solve(p.dY_dx);
  f.dy_dX = -lu.solve(p.dY_dX);
  f.dy_dY = lu.inverse();
  return f;
}

}  // namespace detail

// Slope matrix M = dy/dx of the line with parameter X' through the point (x0, y0).
inline Eigen::MatrixXd line_slope(const ChartExpr& c, const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& y0, const Eigen::VectorXd& Xline) {
  Eigen::VectorXd Yline = detail::chart_first_partials(c, x0, y0, Xline).Y;
  Eigen::VectorXd y = solve_y(c, x0, Xline, Yline, y0);
  return detail::implicit_first(c, x0, y, Xline).dy_dx;
}

// t^i_{jk} = d2y^i/dx^j dX^k - (d2y^i/dx^j dY^l) h^l_m dy^m/dX^k.
// Mixed seconds of the implicit solution by Richardson-extrapolated central
// differences (step 1e-4) of the first-order implicit formulas.
inline ChartJet tableau_at(const ChartExpr& c, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y, const Eigen::VectorXd& X) {
  int n = c.n;
  ChartJet jet{x, y, X, {}, {}, {}, {}, {}, Tableau3(n, n, n)};
  auto base = detail::chart_first_partials(c, x, y, X);
  jet.Y = base.Y;
  auto f0 = detail::implicit_first(c, x, y, X);
  jet.dy_dx = f0.dy_dx;
  jet.dy_dX = f0.dy_dX;
  jet.dy_dY = f0.dy_dY;
  jet.h = base.dY_dy;

  const double h = 1e-4;
  // dy/dx as a function of (X, Y) at fixed x, with y re-solved each time
  auto dy_dx_at = [&](const Eigen::VectorXd& Xp, const Eigen::VectorXd& Yp) {
    Eigen::VectorXd ys = solve_y(c, x, Xp, Yp, y);
    return detail::implicit_first(c, x, ys, Xp).dy_dx;
  };
  auto central = [&](auto&& fn, double step) {
    return ((fn(step) - fn(-step)) / (2.0 * step)).eval();
  };
  auto richardson = [&](auto&& fn) {
    Eigen::MatrixXd d1 = central(fn, h);
    Eigen::MatrixXd d2 = central(fn, h / 2.0);
    return ((4.0 * d2 - d1) / 3.0).eval();
  };

  // A^i_{jk} = d(dy/dx)^i_j / dX^k ;  B^i_{jl} = d(dy/dx)^i_j / dY^l
  std::vector<Eigen::MatrixXd> A(n), B(n);
  for (int k = 0; k < n; ++k) {
    A[k] = richardson([&](double s) {
      return dy_dx_at(X + s * Eigen::VectorXd::Unit(n, k), base.Y);
    });
    B[k] = richardson([&](double s) {
      return dy_dx_at(X, base.Y + s * Eigen::VectorXd::Unit(n, k));
    });
  }
  Eigen::MatrixXd correction = jet.h * jet.dy_dX;  // h^l_m dy^m/dX^k
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double second = A[k](i, j);
        double corr = 0;
        for (int l = 0; l < n; ++l) corr += B[l](i, j) * correction(l, k);
        double v = second - corr;
        if (!std::isfinite(v)) throw ChartError("non-finite tableau entry");
        jet.tableau.at(i, j, k) = v;
      }
  return jet;
}

struct RegularityMargin {
  double margin = 0;               // min over unit (u, v) of |t(u, v)|
  Eigen::VectorXd u, v;            // witness
  double embedded_gauss = 0;       // max over unit Xdot of ||Xdot^k t||_F
};

inline RegularityMargin regularity_margin_of(const Tableau3& t) {
  int n = t.dimU();
  RegularityMargin out;
  if (n == 1) {
    out.margin = std::abs(t.at(0, 0, 0));
    out.u = Eigen::VectorXd::Ones(1);
    out.v = Eigen::VectorXd::Ones(1);
    out.embedded_gauss = out.margin;
    return out;
  }
  // min_{|u|=|v|=1} |t(u,v)| = min_theta sigma_min(T(u(theta))): dense 1-D scan
  // plus golden-section refinement
  auto sigma_min = [&](double theta, Eigen::VectorXd* vout) {
    Eigen::VectorXd u(2);
    u << std::cos(theta), std::sin(theta);
    Eigen::MatrixXd T = t.contractU(u);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(T, Eigen::ComputeThinV);
    if (vout) *vout = svd.matrixV().col(1);
    return svd.singularValues()(1);
  };
  const int grid = 4096;
  double bestTheta = 0, bestVal = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    double theta = M_PI * k / grid;  // antipodal u gives the same value
    double v = sigma_min(theta, nullptr);
    if (v < bestVal) {
      bestVal = v;
      bestTheta = theta;
    }
  }
  double a = bestTheta - M_PI / grid, b = bestTheta + M_PI / grid;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = sigma_min(c1, nullptr), f2 = sigma_min(c2, nullptr);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = c2; c2 = c1; f2 = f1;
      c1 = b - gr * (b - a);
      f1 = sigma_min(c1, nullptr);
    } else {
      a = c1; c1 = c2; f1 = f2;
      c2 = a + gr * (b - a);
      f2 = sigma_min(c2, nullptr);
    }
  }
  double theta = (a + b) / 2;
  Eigen::VectorXd v;
  out.margin = sigma_min(theta, &v);
  out.u = Eigen::VectorXd(2);
  out.u << std::cos(theta), std::sin(theta);
  out.v = v;

  // embedded-Gauss margin: ||M(Xdot)||_F^2 = Xdot' G Xdot, exact eigenvalue
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int kp = 0; kp < n; ++kp) {
      double s = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += t.at(i, j, k) * t.at(i, j, kp);
      G(k, kp) = s;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  out.embedded_gauss = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  return out;
}

inline RegularityMargin regularity_margin(const ChartExpr& c, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y, const Eigen::VectorXd& X) {
  return regularity_margin_of(tableau_at(c, x, y, X).tableau);
}

// Dual-chart tableau at the same flag, computed explicitly from the Hessian
// of the chart functions: the dual solved map is Y(X, x, y) with the roles
// (x,y) <-> (X,Y) swapped.
inline Tableau3 dual_chart_tableau(const ChartExpr& c, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& y, const Eigen::VectorXd& X) {
  int n = c.n;
  auto jets = c.eval(x, y, X);
  // slot layout of the jets: x -> [0,n), y -> [n,2n), X -> [2n,3n)
  auto d2 = [&](int i, int a, int b) { return jets[i].h(a, b); };
  Eigen::MatrixXd dY_dy(n, n), dY_dx(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      dY_dy(i, j) = jets[i].g(n + j);
      dY_dx(i, j) = jets[i].g(j);
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(dY_dy);
  if (!lu.isInvertible()) throw SingularJacobian();
  Eigen::MatrixXd hstar = lu.inverse();  // inverse of dy*/dY* = dY/dy
  Tableau3 t(n, n, n);
  // t*^i_{jk} = d2Y^i/dX^j dx^k - d2Y^i/dX^j dy^l  hstar^l_m  dY^m/dx^k
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double second = d2(i, 2 * n + j, k);
        double corr = 0;
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m)
            corr += d2(i, 2 * n + j, n + l) * hstar(l, m) * dY_dx(m, k);
        t.at(i, j, k) = second - corr;
      }
  return t;
}

struct ScanFlag {
  Eigen::VectorXd x, y, X;
  double margin;
};

struct ScanReport {
  double min_margin = std::numeric_limits<double>::infinity();
  ScanFlag argmin;
  std::vector<ScanFlag> flagged;          // margin <= tol
  double max_dual_deviation = 0;          // duality-relation residual over the grid
  int flags_visited = 0;
};

// Grid scan of regularity margins over a box in (x, y, X), together with the
// dual-chart consistency check: dual_chart_tableau = -dual(tableau).
inline ScanReport regularity_scan(const ChartExpr& c, double lo, double hi, int per_axis,
                                  double tol) {
  if (per_axis < 2) throw ChartError("grid counts must be >= 2");
  int n = c.n;
  int dims = 3 * n;
  std::vector<int> idx(dims, 0);
  ScanReport rep;
  for (;;) {
    Eigen::VectorXd x(n), y(n), X(n);
    for (int d = 0; d < dims; ++d) {
      double t01 = per_axis == 1 ? 0.5 : static_cast<double>(idx[d]) / (per_axis - 1);
      double v = lo + (hi - lo) * t01;
      (d < n ? x(d) : d < 2 * n ? y(d - n) : X(d - 2 * n)) = v;
    }
    ++rep.flags_visited;
    auto jet = tableau_at(c, x, y, X);
    auto m = regularity_margin_of(jet.tableau);
    if (m.margin < rep.min_margin) {
      rep.min_margin = m.margin;
      rep.argmin = {x, y, X, m.margin};
    }
    if (m.margin <= tol) rep.flagged.push_back({x, y, X, m.margin});
    Tableau3 dt = dual_chart_tableau(c, x, y, X);
    Tableau3 dd = dual_tableau(jet.tableau);
    double dev = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          dev = std::max(dev, std::abs(dt.at(i, j, k) + dd.at(i, j, k)));
    rep.max_dual_deviation = std::max(rep.max_dual_deviation, dev);

    int d = 0;
    while (d < dims && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == dims) break;
  }
  return rep;
}

}  // namespace planegeo
