#pragma once

// Radon transform on the classical complex plane, computed in one affine
// chart {y = a x + b}.  A line density f(a, b) on the chart of lines is
// fiber-integrated over the pencil through a point, yielding a real 2-form
// on R^4 = C^2; Monte-Carlo Crofton counting verifies the cohomological
// pairing against intersection numbers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "planegeo/chart_expr.hpp"
#include "planegeo/conic.hpp"
#include "planegeo/projective.hpp"

namespace planegeo {

struct RadonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QuadratureDiverged : RadonError {
  QuadratureDiverged() : RadonError("adaptive quadrature failed to converge") {}
};
struct DegenerateSurface : RadonError {
  using RadonError::RadonError;
};
struct NonTransverseExcess : RadonError {
  NonTransverseExcess()
      : RadonError("more than 1% of samples fell in the non-transversality dead band") {}
};
struct NegativeDensity : RadonError {
  NegativeDensity() : RadonError("relative density is negative on the sample grid") {}
};

using cplx = std::complex<double>;

// Density on the line chart {y = a x + b}.  FubiniStudy is the pushforward
// of the round measure on the space of lines, normalized to total mass 1:
//   f_FS(a, b) = (2 / pi^2) / (1 + |a|^2 + |b|^2)^3.
// A relative density multiplies f_FS by a chart-DSL expression Y1 evaluated
// at x = (Re a, Im a), X = (Re b, Im b).
struct LineDensity {
  std::optional<ChartExpr> relative;  // empty = pure Fubini-Study
  double scale = 1.0;

  static double fubini_study(cplx a, cplx b) {
    double s = 1.0 + std::norm(a) + std::norm(b);
    return (2.0 / (M_PI * M_PI)) / (s * s * s);
  }

  double relative_factor(cplx a, cplx b) const {
    if (!relative) return 1.0;
    Eigen::VectorXd x(2), y(2), X(2);
    x << a.real(), a.imag();
    y.setZero();
    X << b.real(), b.imag();
    return relative->defs.at(0)->eval(x, y, X).v;
  }

  double operator()(cplx a, cplx b) const {
    return scale * fubini_study(a, b) * relative_factor(a, b);
  }

  // f >= 0 on a coarse sample; throws otherwise.
  void check_nonnegative(uint64_t seed = 11) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1.5);
    for (int k = 0; k < 10000; ++k) {
      cplx a(g(rng), g(rng)), b(g(rng), g(rng));
      if ((*this)(a, b) < 0) throw NegativeDensity();
    }
  }
};

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1 - z * z) * pp * pp);
  }
}

struct Moments {
  double m0 = 0, mu = 0, nu = 0, m2 = 0;  // m1 = mu + i nu
  double max_abs() const {
    return std::max({std::abs(m0), std::abs(mu), std::abs(nu), std::abs(m2)});
  }
};

// Integrate f(a, y - a x) {1, Re a, Im a, |a|^2} dA(a) over a in C with a
// polar grid, r = t / (1 - t) on Gauss-Legendre nodes in t, trapezoid in the
// angle; nr x nth resolution.
template <class F>
inline Moments polar_moments(const F& f, cplx x, cplx y, int nr, int nth) {
  std::vector<double> gt, gw;
  gauss_legendre(nr, gt, gw);
  Moments m;
  double dth = 2 * M_PI / nth;
  for (int i = 0; i < nr; ++i) {
    double t = 0.5 * (gt[i] + 1.0);           // (0, 1)
    double wt = 0.5 * gw[i];
    double r = t / (1.0 - t);
    double jac = 1.0 / ((1.0 - t) * (1.0 - t));  // dr/dt
    double ring0 = 0, ring_mu = 0, ring_nu = 0;
    for (int k = 0; k < nth; ++k) {
      double th = dth * (k + 0.5);
      cplx a = std::polar(r, th);
      double fv = f(a, y - a * x);
      ring0 += fv;
      ring_mu += fv * a.real();
      ring_nu += fv * a.imag();
    }
    double common = wt * jac * r * dth;
    m.m0 += common * ring0;
    m.mu += common * ring_mu;
    m.nu += common * ring_nu;
    m.m2 += common * r * r * ring0;
  }
  return m;
}

}  // namespace detail

struct QuadSpec {
  int nr = 48;
  int ntheta = 48;
  double rel_tol = 1e-5;
  int max_doublings = 4;
};

// Pointwise Radon transform as an antisymmetric 4x4 matrix in coordinates
// (x1, x2, y1, y2), convention 2-form = sum_{i<j} M_ij dz_i ^ dz_j:
//   R = m2 dx1^dx2 + m0 dy1^dy2 + mu (dy2^dx1 - dy1^dx2)
//       - nu (dy1^dx1 + dy2^dx2),       m_k = int f(a, y - a x) |a|^k dA,
//       m1 = mu + i nu.
inline Eigen::Matrix4d pointwise_radon(const LineDensity& eta, cplx x, cplx y,
                                       QuadSpec quad = {}) {
  auto f = [&](cplx a, cplx b) { return eta(a, b); };
  detail::Moments prev = detail::polar_moments(f, x, y, quad.nr, quad.ntheta);
  detail::Moments cur;
  bool ok = false;
  int nr = quad.nr, nth = quad.ntheta;
  for (int d = 0; d < quad.max_doublings; ++d) {
    nr *= 2;
    nth *= 2;
    cur = detail::polar_moments(f, x, y, nr, nth);
    double scale = std::max(cur.max_abs(), 1e-300);
    double err = std::max({std::abs(cur.m0 - prev.m0), std::abs(cur.mu - prev.mu),
                           std::abs(cur.nu - prev.nu), std::abs(cur.m2 - prev.m2)});
    prev = cur;
    if (err < quad.rel_tol * scale) {
      ok = true;
      break;
    }
  }
  if (!ok) throw QuadratureDiverged();
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(0, 1) = cur.m2;
  M(2, 3) = cur.m0;
  M(0, 3) = -cur.mu;
  M(1, 2) = cur.mu;
  M(0, 2) = cur.nu;
  M(1, 3) = cur.nu;
  M -= Eigen::Matrix4d(M.transpose());
  return M;
}

// Evaluate the 2-form on a pair of tangent vectors.
inline double form_eval(const Eigen::Matrix4d& M, const Eigen::Vector4d& u,
                        const Eigen::Vector4d& v) {
  return u.transpose() * M * v;
}

// Oriented real basis of the tangent plane of the line {y = a x + b}.
inline std::pair<Eigen::Vector4d, Eigen::Vector4d> line_tangent_basis(cplx a) {
  Eigen::Vector4d u(1, 0, a.real(), a.imag());
  Eigen::Vector4d v(0, 1, -a.imag(), a.real());
  return {u, v};
}

// wedge square R ^ R as a multiple of dx1^dx2^dy1^dy2 (positive <=> volume
// form with the complex orientation).
inline double wedge_square(const Eigen::Matrix4d& M) {
  // Pfaffian-type expansion: (R^R)/2 = M01 M23 - M02 M13 + M03 M12
  return 2.0 * (M(0, 1) * M(2, 3) - M(0, 2) * M(1, 3) + M(0, 3) * M(1, 2));
}

// Max relative residual of dR over the given points: central differences of
// the six coefficients, four 3-form components, normalized by the largest
// coefficient magnitude seen.
struct ClosednessReport {
  double max_residual = 0;
  double normalizer = 0;
};

inline ClosednessReport closedness_check(const LineDensity& eta,
                                         const std::vector<Eigen::Vector4d>& points,
                                         double h = 1e-3, QuadSpec quad = {}) {
  auto R = [&](const Eigen::Vector4d& p) {
    return pointwise_radon(eta, cplx(p(0), p(1)), cplx(p(2), p(3)), quad);
  };
  ClosednessReport rep;
  for (const auto& p : points) {
    // dM[d] = dR/dz_d by central differences
    Eigen::Matrix4d dM[4];
    for (int d = 0; d < 4; ++d) {
      Eigen::Vector4d pp = p, pm = p;
      pp(d) += h;
      pm(d) -= h;
      dM[d] = (R(pp) - R(pm)) / (2 * h);
    }
    Eigen::Matrix4d M0 = R(p);
    rep.normalizer = std::max(rep.normalizer, M0.cwiseAbs().maxCoeff());
    // (dR)_{ijk} = d_i M_jk - d_j M_ik + d_k M_ij for i<j<k
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        for (int k = j + 1; k < 4; ++k) {
          double r = dM[i](j, k) - dM[j](i, k) + dM[k](i, j);
          rep.max_residual = std::max(rep.max_residual, std::abs(r));
        }
  }
  if (rep.normalizer > 0) rep.max_residual /= rep.normalizer;
  return rep;
}

// --- test surfaces and Monte-Carlo Crofton -----------------------------------

struct Triangle4 {
  Eigen::Vector4d v0, v1, v2;
  double area() const {
    Eigen::Vector4d e1 = v1 - v0, e2 = v2 - v0;
    double g11 = e1.squaredNorm(), g22 = e2.squaredNorm(), g12 = e1.dot(e2);
    return 0.5 * std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
  }
};

struct TriangulatedPatch {
  std::vector<Triangle4> tris;
};

using TestSurface = std::variant<Hom<cplx>, Conic<cplx>, TriangulatedPatch>;

struct CroftonResult {
  double estimate = 0;
  double stderr_ = 0;
  long samples = 0;
  long rejected_vertical = 0;
  long dead_band = 0;
};

namespace detail {

// Haar-random projective line over C from a normalized complex Gaussian
// coefficient vector; pushforward to the (a, b) chart is Fubini-Study.
inline Eigen::Vector3cd haar_line(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, 1);
  Eigen::Vector3cd l;
  for (int i = 0; i < 3; ++i) l(i) = cplx(g(rng), g(rng));
  return l / l.norm();
}

struct SampledLine {
  cplx a, b;        // chart coordinates of the line y = a x + b
  Eigen::Vector3cd coeffs;  // l0 x + l1 y + l2 = 0
};

// number of intersection points of the sampled line with the surface;
// dead-band hits return -1.
inline int count_vs_line(const SampledLine& s, const Hom<cplx>& L) {
  // two projective lines meet once unless they coincide
  auto c = cross3<cplx>(L.normalized().v, Eigen::Vector3cd(s.coeffs).normalized());
  if (c.norm() < 1e-10) return -1;
  return 1;
}

inline int count_vs_conic(const SampledLine& s, const Conic<cplx>& Q) {
  Hom<cplx> l{s.coeffs};
  auto pts = line_conic_intersect(Q, l);
  if (pts.size() == 2) {
    // tangency dead band
    if (pts[0].same(pts[1], 1e-6)) return -1;
    return 2;
  }
  return -1;
}

inline int count_vs_patch(const SampledLine& s, const TriangulatedPatch& P) {
  int total = 0;
  cplx a = s.a, b = s.b;
  for (const auto& T : P.tris) {
    Eigen::Vector4d e1 = T.v1 - T.v0, e2 = T.v2 - T.v0;
    // g(s,t) = y(s,t) - a x(s,t) - b = 0 in C, linear in (s,t)
    auto gfun = [&](const Eigen::Vector4d& v) {
      cplx x(v(0), v(1)), y(v(2), v(3));
      return y - a * x - b;
    };
    cplx g0 = gfun(T.v0);
    cplx g1 = gfun(T.v0 + e1) - g0;
    cplx g2 = gfun(T.v0 + e2) - g0;
    Eigen::Matrix2d A;
    A << g1.real(), g2.real(), g1.imag(), g2.imag();
    double det = A.determinant();
    double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    if (std::abs(det) < 1e-10 * scale * scale) {
      if (std::abs(g0) < 1e-10) return -1;  // line in the triangle plane
      continue;                              // parallel, no hit
    }
    Eigen::Vector2d st = A.inverse() * Eigen::Vector2d(-g0.real(), -g0.imag());
    double u = st(0), v = st(1);
    double band = 1e-10;
    bool inside = u > band && v > band && u + v < 1.0 - band;
    bool boundary = (u > -band && v > -band && u + v < 1.0 + band) && !inside;
    if (boundary) return -1;  // edge hit dead band
    if (!inside) continue;
    // orientation sign of (line tangent plane, triangle plane) in R^4
    auto [t1, t2] = line_tangent_basis(a);
    Eigen::Matrix4d O;
    O.col(0) = t1;
    O.col(1) = t2;
    O.col(2) = e1;
    O.col(3) = e2;
    double od = O.determinant();
    if (std::abs(od) < 1e-10) return -1;
    total += od > 0 ? 1 : -1;
  }
  return total;
}

}  // namespace detail

inline void validate_surface(const TestSurface& S) {
  if (std::holds_alternative<Conic<cplx>>(S)) {
    if (!std::get<Conic<cplx>>(S).smooth())
      throw DegenerateSurface("conic is singular");
  } else if (std::holds_alternative<TriangulatedPatch>(S)) {
    for (const auto& T : std::get<TriangulatedPatch>(S).tris)
      if (T.area() < 1e-12) throw DegenerateSurface("degenerate triangle in patch");
  }
}

inline CroftonResult crofton_mc(const LineDensity& eta, const TestSurface& S, long N,
                                uint64_t seed) {
  if (N < 1000) throw RadonError("crofton_mc requires N >= 1000");
  validate_surface(S);
  std::mt19937_64 rng(seed);
  CroftonResult res;
  double sum = 0, sum_c = 0;   // Kahan
  double sq = 0, sq_c = 0;
  long taken = 0;
  while (taken < N) {
    Eigen::Vector3cd l = detail::haar_line(rng);
    // chart {y = a x + b}: l0 x + l1 y + l2 = 0 with |l1| away from 0
    if (std::abs(l(1)) < 1e-8) {
      ++res.rejected_vertical;
      continue;
    }
    detail::SampledLine s{-l(0) / l(1), -l(2) / l(1), l};
    int cnt = std::visit(
        [&](const auto& surf) { return [&] {
            using T = std::decay_t<decltype(surf)>;
            if constexpr (std::is_same_v<T, Hom<cplx>>)
              return detail::count_vs_line(s, surf);
            else if constexpr (std::is_same_v<T, Conic<cplx>>)
              return detail::count_vs_conic(s, surf);
            else
              return detail::count_vs_patch(s, surf);
          }(); },
        S);
    ++taken;
    if (cnt < 0 && !std::holds_alternative<TriangulatedPatch>(S)) {
      ++res.dead_band;
      continue;
    }
    if (cnt < 0) {  // patch dead-band
      ++res.dead_band;
      continue;
    }
    double w = eta.scale * eta.relative_factor(s.a, s.b) * cnt;
    double y1 = w - sum_c;
    double t1 = sum + y1;
    sum_c = (t1 - sum) - y1;
    sum = t1;
    double y2 = w * w - sq_c;
    double t2 = sq + y2;
    sq_c = (t2 - sq) - y2;
    sq = t2;
  }
  if (res.dead_band > N / 100) throw NonTransverseExcess();
  long n = N - res.dead_band;
  res.samples = n;
  res.estimate = sum / n;
  double var = std::max(0.0, sq / n - res.estimate * res.estimate);
  res.stderr_ = std::sqrt(var / n);
  return res;
}

struct AdditivityReport {
  CroftonResult whole, part1, part2;
  double discrepancy = 0;
  double sigma3 = 0;
  bool pass = false;
};

inline AdditivityReport crofton_additivity(const LineDensity& eta, const TestSurface& whole,
                                           const TestSurface& part1, const TestSurface& part2,
                                           long N, uint64_t seed) {
  AdditivityReport rep;
  rep.whole = crofton_mc(eta, whole, N, seed);
  rep.part1 = crofton_mc(eta, part1, N, seed);
  rep.part2 = crofton_mc(eta, part2, N, seed);
  rep.discrepancy = std::abs(rep.whole.estimate - rep.part1.estimate - rep.part2.estimate);
  rep.sigma3 = 3 * std::sqrt(rep.whole.stderr_ * rep.whole.stderr_ +
                             rep.part1.stderr_ * rep.part1.stderr_ +
                             rep.part2.stderr_ * rep.part2.stderr_);
  rep.pass = rep.discrepancy <= rep.sigma3 + 1e-12;
  return rep;
}

// Integral of the pointwise 2-form over a patch: midpoint rule per triangle,
// R_centroid(e1, e2) / 2.
inline double integrate_form_over_patch(const LineDensity& eta, const TriangulatedPatch& P,
                                        QuadSpec quad = {}) {
  double total = 0;
  for (const auto& T : P.tris) {
    Eigen::Vector4d c = (T.v0 + T.v1 + T.v2) / 3.0;
    Eigen::Matrix4d M = pointwise_radon(eta, cplx(c(0), c(1)), cplx(c(2), c(3)), quad);
    total += 0.5 * form_eval(M, T.v1 - T.v0, T.v2 - T.v0);
  }
  return total;
}

// graph of the complex line y = a x + b over a disk |x - x0| <= rad,
// triangulated by a fan-of-rings mesh with complex orientation.
inline TriangulatedPatch line_graph_patch(cplx a, cplx b, cplx x0, double rad, int rings = 8,
                                          int sectors = 24, double theta0 = 0,
                                          double theta1 = 2 * M_PI) {
  auto pt = [&](double r, double th) {
    cplx x = x0 + std::polar(r, th);
    cplx y = a * x + b;
    return Eigen::Vector4d(x.real(), x.imag(), y.real(), y.imag());
  };
  TriangulatedPatch P;
  for (int i = 0; i < rings; ++i) {
    double r0 = rad * i / rings, r1 = rad * (i + 1) / rings;
    for (int k = 0; k < sectors; ++k) {
      double t0 = theta0 + (theta1 - theta0) * k / sectors;
      double t1 = theta0 + (theta1 - theta0) * (k + 1) / sectors;
      Eigen::Vector4d A = pt(r0, t0), B = pt(r1, t0), C = pt(r1, t1), D = pt(r0, t1);
      P.tris.push_back({A, B, C});
      if (i > 0) P.tris.push_back({A, C, D});
    }
  }
  return P;
}

// patch file IO: rows `x1 y1 x2 y2 x3 y3` with 4 reals per vertex (12 per row)
inline void write_patch(std::ostream& os, const TriangulatedPatch& P) {
  os.precision(17);
  for (const auto& T : P.tris) {
    for (int i = 0; i < 4; ++i) os << T.v0(i) << ' ';
    for (int i = 0; i < 4; ++i) os << T.v1(i) << ' ';
    for (int i = 0; i < 4; ++i) os << T.v2(i) << (i == 3 ? '\n' : ' ');
  }
}

inline TriangulatedPatch read_patch(std::istream& is) {
  TriangulatedPatch P;
  double v[12];
  while (is >> v[0]) {
    for (int i = 1; i < 12; ++i)
      if (!(is >> v[i])) throw RadonError("bad patch file: truncated triangle row");
    Triangle4 T;
    for (int i = 0; i < 4; ++i) {
      T.v0(i) = v[i];
      T.v1(i) = v[4 + i];
      T.v2(i) = v[8 + i];
    }
    P.tris.push_back(T);
  }
  return P;
}

}  // namespace planegeo
