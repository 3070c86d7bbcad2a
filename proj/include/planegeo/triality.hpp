#pragma once

// Triality testing, triality algebras, classicality, integral elements
// and the 2-dimensional normal form.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "planegeo/tableau.hpp"

namespace planegeo {

struct TrialityVerdict {
  bool verdict = false;
  double margin = 0.0;                    // min over unit u of |det t_u|^(1/n)
  std::optional<Eigen::VectorXd> witness; // unit u achieving the margin
};

namespace detail {

inline double det_at(const Tableau3& t, const Eigen::VectorXd& u) {
  return t.contractU(u).determinant();
}

// Deterministic low-discrepancy points on S^(n-1), n even: Kronecker
// sequence in the cube, Box-Muller to Gaussians, normalize.
inline std::vector<Eigen::VectorXd> sphere_grid(int n, int count) {
  // generalized golden-ratio increments (R_d sequence)
  double phi = 1.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (n + 1));
  std::vector<double> alpha(n);
  double p = 1.0 / phi;
  for (int d = 0; d < n; ++d) {
    alpha[d] = p;
    p /= phi;
  }
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(count);
  std::vector<double> x(n, 0.5);
  for (int k = 0; k < count; ++k) {
    for (int d = 0; d < n; ++d) x[d] = std::fmod(x[d] + alpha[d], 1.0);
    Eigen::VectorXd g(n);
    for (int d = 0; d + 1 < n; d += 2) {
      double r = std::sqrt(-2.0 * std::log(std::max(x[d], 1e-300)));
      g(d) = r * std::cos(2.0 * M_PI * x[d + 1]);
      g(d + 1) = r * std::sin(2.0 * M_PI * x[d + 1]);
    }
    double nrm = g.norm();
    if (nrm < 1e-12) continue;
    pts.push_back(g / nrm);
  }
  return pts;
}

// Projected gradient descent on |det t_u| over the unit sphere.
inline void descend_det(const Tableau3& t, Eigen::VectorXd& u, double& value, int steps) {
  int n = t.dimU();
  for (int it = 0; it < steps; ++it) {
    Eigen::MatrixXd T = t.contractU(u);
    double det = T.determinant();
    // d(det)/du_nu = tr(adj(T) dT/du_nu)
    Eigen::MatrixXd adj = det * T.inverse();  // fallback below when near-singular
    if (!adj.allFinite()) {
      // cofactor expansion via partial LU of minors would be overkill; a
      // tiny regularization suffices for the gradient direction
      Eigen::MatrixXd Treg = T + 1e-12 * Eigen::MatrixXd::Identity(n, n);
      adj = Treg.determinant() * Treg.inverse();
    }
    Eigen::VectorXd grad(n);
    for (int nu = 0; nu < n; ++nu) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(nu) = 1.0;
      grad(nu) = (adj.transpose() * t.contractU(e)).trace();
    }
    if (det < 0) grad = -grad;  // minimizing |det|
    grad -= grad.dot(u) * u;    // tangent projection
    double gn = grad.norm();
    if (gn < 1e-15) break;
    double step = 0.5;
    bool moved = false;
    for (int bt = 0; bt < 25; ++bt) {
      Eigen::VectorXd cand = (u - step * grad).normalized();
      double cv = std::abs(det_at(t, cand));
      if (cv < std::abs(det)) {
        u = cand;
        value = cv;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  value = std::abs(det_at(t, u));
}

}  // namespace detail

inline TrialityVerdict is_triality(const Tableau3& t, double tol) {
  if (!t.square()) throw NotSquare();
  int n = t.dimU();
  if (n != 1 && n != 2 && n != 4 && n != 8) throw BadDimension();
  TrialityVerdict out;
  if (n == 1) {
    out.margin = std::abs(t.at(0, 0, 0));
    out.witness = Eigen::VectorXd::Ones(1);
  } else if (n == 2) {
    // det t_u = A u0^2 + B u0 u1 + C u1^2 : exact extrema on the circle
    auto e0 = Eigen::VectorXd::Unit(2, 0), e1 = Eigen::VectorXd::Unit(2, 1);
    double A = detail::det_at(t, e0);
    double C = detail::det_at(t, e1);
    double B = detail::det_at(t, e0 + e1) - A - C;
    Eigen::Matrix2d M;
    M << A, B / 2, B / 2, C;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
    double l0 = es.eigenvalues()(0), l1 = es.eigenvalues()(1);
    if (l0 <= 0.0 && 0.0 <= l1) {
      out.margin = 0.0;
      // zero direction: u = cos(s) v1 + sin(s) v0 with l1 cos^2 + l0 sin^2 = 0
      if (l1 - l0 > 0) {
        double c2 = -l0 / (l1 - l0);  // cos^2 s
        double c = std::sqrt(std::clamp(c2, 0.0, 1.0)), s = std::sqrt(1.0 - c2);
        Eigen::Vector2d w = c * es.eigenvectors().col(1) + s * es.eigenvectors().col(0);
        out.witness = Eigen::VectorXd(w.normalized());
      } else {
        out.witness = Eigen::VectorXd(es.eigenvectors().col(0));
      }
    } else {
      int idx = std::abs(l0) < std::abs(l1) ? 0 : 1;
      out.margin = std::sqrt(std::abs(es.eigenvalues()(idx)));
      out.witness = Eigen::VectorXd(es.eigenvectors().col(idx));
    }
  } else {
    // deterministic sphere grid plus local descent from the best cells
    auto grid = detail::sphere_grid(n, 1 << 13);
    std::vector<std::pair<double, int>> scored;
    scored.reserve(grid.size());
    for (int i = 0; i < static_cast<int>(grid.size()); ++i)
      scored.push_back({std::abs(detail::det_at(t, grid[i])), i});
    std::partial_sort(scored.begin(), scored.begin() + 16, scored.end());
    double best = scored[0].first;
    Eigen::VectorXd bestU = grid[scored[0].second];
    for (int k = 0; k < 16; ++k) {
      Eigen::VectorXd u = grid[scored[k].second];
      double v = scored[k].first;
      detail::descend_det(t, u, v, 20);
      if (v < best) {
        best = v;
        bestU = u;
      }
    }
    out.margin = std::pow(best, 1.0 / n);
    out.witness = bestU;
  }
  out.verdict = out.margin > tol;
  return out;
}

struct TriAlgebra {
  Tableau3 tableau;
  Eigen::VectorXd eU, eV;
  Eigen::MatrixXd epsU, epsV;      // eps_U: u -> t_u(e_V), eps_V: v -> t_{e_U}(v)
  Eigen::MatrixXd epsUinv, epsVinv;
  Eigen::VectorXd identity;        // = t(e_U, e_V)

  int dim() const { return tableau.dimU(); }

  // v0 v1 = eps_V^-1 t(eps_U^-1 v0, v1)
  Eigen::VectorXd product(const Eigen::VectorXd& v0, const Eigen::VectorXd& v1) const {
    return epsVinv * tableau.apply(epsUinv * v0, v1);
  }

  // L_x as a matrix: v -> x v
  Eigen::MatrixXd left_mult(const Eigen::VectorXd& x) const {
    return epsVinv * tableau.contractU(epsUinv * x);
  }
};

inline TriAlgebra triality_algebra(const Tableau3& t, const Eigen::VectorXd& eU,
                                   const Eigen::VectorXd& eV) {
  if (!t.square()) throw NotSquare();
  int n = t.dimU();
  if (eU.size() != n || eV.size() != n || eU.norm() == 0 || eV.norm() == 0)
    throw TableauError("base vectors must be nonzero of matching dimension");
  TriAlgebra a{t, eU, eV, {}, {}, {}, {}, {}};
  a.epsU = Eigen::MatrixXd::Zero(n, n);
  for (int nu = 0; nu < n; ++nu)
    a.epsU.col(nu) = t.apply(Eigen::VectorXd::Unit(n, nu), eV);
  a.epsV = t.contractU(eU);
  Eigen::FullPivLU<Eigen::MatrixXd> luU(a.epsU), luV(a.epsV);
  if (!luU.isInvertible()) throw SingularMatrix("eps_U is singular");
  if (!luV.isInvertible()) throw SingularMatrix("eps_V is singular");
  a.epsUinv = luU.inverse();
  a.epsVinv = luV.inverse();
  a.identity = t.apply(eU, eV);
  // identity law check, per construction rather than assumption
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, k);
    if ((a.product(a.identity, v) - v).norm() > 1e-8 * std::max(1.0, a.identity.norm()))
      throw TableauError("identity law failed; tableau is not a triality here");
  }
  return a;
}

inline double real_part(const TriAlgebra& a, const Eigen::VectorXd& v) {
  Eigen::VectorXd u = a.epsUinv * v;
  return a.tableau.contractU(u).trace() / a.dim();
}

inline Eigen::VectorXd imaginary_part(const TriAlgebra& a, const Eigen::VectorXd& v) {
  return v - real_part(a, v) * a.identity;
}

// L_x^2 proportional to Id for imaginary x, plus polarized pairs.
inline bool is_classical(const TriAlgebra& a, double tol) {
  int n = a.dim();
  if (n == 1) return true;
  // imaginary subspace = kernel of the (linear) real-part functional; the
  // formula v - Re(v) identity only projects onto it when Re(identity) = 1,
  // which can fail away from the standard base points
  Eigen::VectorXd r(n);
  for (int k = 0; k < n; ++k) r(k) = real_part(a, Eigen::VectorXd::Unit(n, k));
  if (r.norm() < 1e-12) return false;  // Re vanishes identically: degenerate
  Eigen::MatrixXd P =
      Eigen::MatrixXd::Identity(n, n) - r * r.transpose() / r.squaredNorm();
  Eigen::JacobiSVD<Eigen::MatrixXd> proj_svd(P, Eigen::ComputeFullU);
  std::vector<Eigen::VectorXd> imag;
  for (int k = 0; k < n - 1; ++k) imag.push_back(proj_svd.matrixU().col(k));

  auto residual = [&](const Eigen::MatrixXd& M) {
    Eigen::MatrixXd off = M - (M.trace() / n) * Eigen::MatrixXd::Identity(n, n);
    return off.norm();
  };
  std::vector<Eigen::MatrixXd> L;
  for (auto& x : imag) L.push_back(a.left_mult(x));
  for (size_t i = 0; i < L.size(); ++i) {
    double scale = L[i].norm() * L[i].norm();
    if (residual(L[i] * L[i]) >= tol * std::max(scale, 1e-300)) return false;
    for (size_t j = i + 1; j < L.size(); ++j) {
      double s2 = L[i].norm() * L[j].norm();
      if (residual(L[i] * L[j] + L[j] * L[i]) >= tol * std::max(s2, 1e-300)) return false;
    }
  }
  return true;
}

struct IntegralElementSpace {
  int dimension = 0;
  std::vector<Eigen::MatrixXd> basis;  // Frobenius-orthonormal
  double residual = 0.0;               // max condition residual over the basis
};

// Nullspace of p -> t^mu_{nu sigma} p^sigma_tau - t^mu_{tau sigma} p^sigma_nu.
inline IntegralElementSpace integral_elements(const Tableau3& t) {
  if (!t.square()) throw NotSquare();
  int n = t.dimU();
  int rows = n * n * n, cols = n * n;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(rows, cols);
  auto pidx = [n](int sigma, int tau) { return sigma * n + tau; };
  int r = 0;
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      for (int tau = 0; tau < n; ++tau, ++r)
        for (int sigma = 0; sigma < n; ++sigma) {
          L(r, pidx(sigma, tau)) += t.at(mu, nu, sigma);
          L(r, pidx(sigma, nu)) -= t.at(mu, tau, sigma);
        }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeThinV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  double thresh = 1e-10 * std::max(smax, 1.0);
  IntegralElementSpace out;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) <= thresh) ++out.dimension;
  if (smax == 0.0) out.dimension = cols;  // t == 0 edge: whole space
  int rank = cols - out.dimension;
  for (int k = rank; k < cols; ++k) {
    Eigen::VectorXd v = svd.matrixV().col(k);
    Eigen::MatrixXd p(n, n);
    for (int sigma = 0; sigma < n; ++sigma)
      for (int tau = 0; tau < n; ++tau) p(sigma, tau) = v(pidx(sigma, tau));
    out.residual = std::max(out.residual, (L * v).norm());
    out.basis.push_back(p);
  }
  return out;
}

struct NormalForm2 {
  Tableau3 normal;       // t'^mu_{nu sigma} = delta^mu_nu delta^0_sigma + a^mu_nu delta^1_sigma
  Eigen::Matrix2d a;
  Eigen::MatrixXd gU, gV, gW;  // the isotopy applied
};

inline NormalForm2 normal_form_2d(const Tableau3& t) {
  if (!t.square() || t.dimU() != 2) throw TableauError("normal_form_2d needs a square 2-tableau");
  // M_w = matrix of u -> t(u, w); invertible for w != 0 for a triality
  auto Mw = [&](const Eigen::VectorXd& w) { return t.contractV(w); };
  Eigen::MatrixXd M0 = Mw(Eigen::VectorXd::Unit(2, 0));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M0);
  if (!lu.isInvertible())
    throw TableauError("degenerate: t(., e0) singular (not a triality)");
  Eigen::MatrixXd gW = lu.inverse();
  NormalForm2 out{isotopy_transform(t, Eigen::MatrixXd::Identity(2, 2),
                                    Eigen::MatrixXd::Identity(2, 2), gW),
                  {}, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2), gW};
  Eigen::MatrixXd M1 = out.normal.contractV(Eigen::VectorXd::Unit(2, 1));
  out.a = M1;
  return out;
}

}  // namespace planegeo
