#pragma once

// Conics as symmetric 3x3 matrices up to scale over R or C: conic through
// 5 points, tangent lines, dual conics, conic-conic intersection and common
// tangents.

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "planegeo/projective.hpp"

namespace planegeo {

struct ConicError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ColinearTriple : ConicError {
  ColinearTriple() : ConicError("three of the five points are colinear") {}
};
struct RankDeficient : ConicError {
  RankDeficient() : ConicError("points do not determine a unique conic") {}
};
struct DegenerateConic : ConicError {
  using ConicError::ConicError;
};
struct NotOnConic : ConicError {
  NotOnConic() : ConicError("point is not on the conic") {}
};
struct InsideConic : ConicError {
  InsideConic() : ConicError("no real tangents from an interior point") {}
};
struct IdenticalConics : ConicError {
  IdenticalConics() : ConicError("conics coincide up to scale") {}
};

template <class K>
struct Conic {
  Eigen::Matrix<K, 3, 3> Q;  // symmetric, up to scale

  Conic() { Q.setZero(); }
  explicit Conic(const Eigen::Matrix<K, 3, 3>& m) : Q((m + m.transpose().eval()) / K(2)) {
    normalize();
  }

  void normalize() {
    double m = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m = std::max(m, mag(Q(i, j)));
    if (m > 0) Q /= K(m);
  }

  K value(const Hom<K>& p) const { return p.v.transpose() * Q * p.v; }
  bool contains(const Hom<K>& p, double tol = 1e-10) const {
    auto n = p.normalized();
    return mag(K(n.v.transpose() * Q * n.v)) < tol;
  }
  bool smooth(double tol = 1e-10) const { return mag(K(Q.determinant())) > tol; }

  Eigen::Matrix<K, 3, 3> adjugate() const {
    Eigen::Matrix<K, 3, 3> a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
        a(j, i) = Q(i1, j1) * Q(i2, j2) - Q(i1, j2) * Q(i2, j1);
      }
    return a;
  }

  Conic dual() const { return Conic(adjugate()); }

  bool same(const Conic& o, double tol = 1e-9) const {
    Conic a = *this, b = o;
    a.normalize();
    b.normalize();
    // compare up to phase: align on largest entry
    int bi = 0, bj = 0;
    double best = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (mag(a.Q(i, j)) > best) {
          best = mag(a.Q(i, j));
          bi = i;
          bj = j;
        }
    if (best == 0 || mag(b.Q(bi, bj)) < tol) return false;
    K scale = a.Q(bi, bj) / b.Q(bi, bj);
    return (a.Q - scale * b.Q).norm() < tol;
  }

  // affine conic a x^2 + b xy + c y^2 + d x + e y + f = 0
  static Conic from_coeffs(K a, K b, K c, K d, K e, K f) {
    Eigen::Matrix<K, 3, 3> m;
    m << a, b / K(2), d / K(2), b / K(2), c, e / K(2), d / K(2), e / K(2), f;
    return Conic(m);
  }

  static Conic circle(double cx, double cy, double r) {
    return from_coeffs(K(1), K(0), K(1), K(-2 * cx), K(-2 * cy), K(cx * cx + cy * cy - r * r));
  }
};

// Nullspace of the 5x6 Veronese system.
template <class K>
inline Conic<K> conic_through_5(const std::array<Hom<K>, 5>& pts) {
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b)
      for (int c = b + 1; c < 5; ++c) {
        Eigen::Matrix<K, 3, 3> m;
        m.col(0) = pts[a].normalized().v;
        m.col(1) = pts[b].normalized().v;
        m.col(2) = pts[c].normalized().v;
        if (mag(K(m.determinant())) < 1e-8) throw ColinearTriple();
      }
  Eigen::Matrix<K, 5, 6> V;
  for (int r = 0; r < 5; ++r) {
    auto p = pts[r].normalized().v;
    V(r, 0) = p(0) * p(0);
    V(r, 1) = p(0) * p(1);
    V(r, 2) = p(1) * p(1);
    V(r, 3) = p(0) * p(2);
    V(r, 4) = p(1) * p(2);
    V(r, 5) = p(2) * p(2);
  }
  Eigen::JacobiSVD<Eigen::Matrix<K, 5, 6>> svd(V, Eigen::ComputeFullV);
  double smax = svd.singularValues()(0);
  if (svd.singularValues()(4) < 1e-10 * smax) throw RankDeficient();
  Eigen::Matrix<K, 6, 1> c = svd.matrixV().col(5);
  Conic<K> conic = Conic<K>::from_coeffs(c(0), c(1), c(2), c(3), c(4), c(5));
  if (!conic.smooth())
    throw DegenerateConic("five points determine a degenerate conic (line pair)");
  return conic;
}

template <class K>
inline HomLine<K> tangent_line(const Conic<K>& Q, const HomPoint<K>& p) {
  if (!Q.contains(p, 1e-8)) throw NotOnConic();
  Eigen::Matrix<K, 3, 1> l = Q.Q * p.normalized().v;
  return Hom<K>{l}.normalized();
}

namespace detail {

template <class K>
inline std::vector<K> solve_quadratic(K a, K b, K c) {
  // a t^2 + b t + c = 0
  if (mag(a) < 1e-14 * std::max(mag(b), mag(c))) {
    if (mag(b) < 1e-14 * mag(c)) return {};
    return {-c / b};
  }
  if constexpr (std::is_same_v<K, std::complex<double>>) {
    K disc = std::sqrt(b * b - K(4) * a * c);
    K q = mag(K(b + disc)) > mag(K(b - disc)) ? (b + disc) : (b - disc);
    if (mag(q) < 1e-300) return {K(0), K(0)};
    return {-q / (K(2) * a), K(-2) * c / q};
  } else {
    double disc = b * b - 4 * a * c;
    if (disc < 0) return {};
    double s = std::sqrt(disc);
    double q = -(b + (b >= 0 ? s : -s)) / 2;
    if (std::abs(q) < 1e-300) return {0.0, 0.0};
    return {q / a, c / q};
  }
}

}  // namespace detail

// Tangent lines to Q through an external point p: quadratic l'(adj Q)l = 0 on
// the pencil of lines through p.  Over R, 0 real tangents throws InsideConic.
template <class K>
inline std::vector<HomLine<K>> tangents_from(const Conic<K>& Q, const HomPoint<K>& p) {
  auto adj = Q.adjugate();
  // a non-degenerate pencil through p: pick the coordinate-point pair with
  // the best triple determinant against p
  auto pn = p.normalized();
  int bi = 0, bj = 1;
  double best = -1;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      Eigen::Matrix<K, 3, 3> m = Eigen::Matrix<K, 3, 3>::Zero();
      m.col(0) = pn.v;
      m(i, 1) = K(1);
      m(j, 2) = K(1);
      double d = mag(K(m.determinant()));
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  Eigen::Matrix<K, 3, 1> a1 = Eigen::Matrix<K, 3, 1>::Zero(), a2 = a1;
  a1(bi) = K(1);
  a2(bj) = K(1);
  HomLine<K> l1 = join(pn, Hom<K>{a1}), l2 = join(pn, Hom<K>{a2});
  auto q = [&](const Eigen::Matrix<K, 3, 1>& u, const Eigen::Matrix<K, 3, 1>& w) {
    return K(u.transpose() * adj * w);
  };
  // l(t) = l1 + t l2
  K a = q(l2.v, l2.v), b = K(2) * q(l1.v, l2.v), c = q(l1.v, l1.v);
  auto roots = detail::solve_quadratic(a, b, c);
  std::vector<HomLine<K>> out;
  for (auto t : roots) {
    Eigen::Matrix<K, 3, 1> l = l1.v + t * l2.v;
    if (l.norm() > 1e-12) out.push_back(Hom<K>{l}.normalized());
  }
  // l2 itself is the root "t = infinity" when a ~ 0
  if (roots.size() < 2 && mag(a) < 1e-12 * std::max({mag(b), mag(c), 1e-300}))
    out.push_back(l2);
  if constexpr (std::is_same_v<K, double>) {
    if (out.empty()) throw InsideConic();
  }
  return out;
}

// Intersection points of a line with a conic (over the given field).
template <class K>
inline std::vector<HomPoint<K>> line_conic_intersect(const Conic<K>& Q, const HomLine<K>& l) {
  // parametrize the line by two points on it
  auto ln = l.normalized().v;
  // find two independent points on l: columns of a basis of the kernel of l^T
  int piv = 0;
  double best = 0;
  for (int i = 0; i < 3; ++i)
    if (mag(ln(i)) > best) {
      best = mag(ln(i));
      piv = i;
    }
  Eigen::Matrix<K, 3, 1> p0 = Eigen::Matrix<K, 3, 1>::Zero(), p1 = p0;
  int o1 = (piv + 1) % 3, o2 = (piv + 2) % 3;
  p0(o1) = K(1);
  p0(piv) = -ln(o1) / ln(piv);
  p1(o2) = K(1);
  p1(piv) = -ln(o2) / ln(piv);
  auto q = [&](const Eigen::Matrix<K, 3, 1>& u, const Eigen::Matrix<K, 3, 1>& w) {
    return K(u.transpose() * Q.Q * w);
  };
  K a = q(p1, p1), b = K(2) * q(p0, p1), c = q(p0, p0);
  auto roots = detail::solve_quadratic(a, b, c);
  std::vector<HomPoint<K>> out;
  if (mag(a) < 1e-13 * std::max({mag(b), mag(c), 1e-300})) {
    // p1 on the conic: it is a point at "t = infinity"
    out.push_back(Hom<K>{p1}.normalized());
  }
  for (auto t : roots) {
    Eigen::Matrix<K, 3, 1> pt = p0 + t * p1;
    if (pt.norm() > 1e-12) out.push_back(Hom<K>{pt}.normalized());
  }
  return out;
}

// --- conic-conic intersection via the degenerate pencil member ---------------

namespace detail {

using C = std::complex<double>;

inline std::vector<C> cubic_roots(C a, C b, C c, C d) {
  // a z^3 + b z^2 + c z + d = 0, general complex coefficients
  if (std::abs(a) < 1e-13 * std::max({std::abs(b), std::abs(c), std::abs(d)})) {
    auto r = solve_quadratic<C>(b, c, d);
    return {r.begin(), r.end()};
  }
  b /= a; c /= a; d /= a;
  C p = c - b * b / 3.0;
  C q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  C disc = q * q / 4.0 + p * p * p / 27.0;
  C sq = std::sqrt(disc);
  C u3 = -q / 2.0 + sq;
  if (std::abs(u3) < 1e-18) u3 = -q / 2.0 - sq;
  C u = std::pow(u3, 1.0 / 3.0);
  std::vector<C> roots;
  const C w(-0.5, std::sqrt(3.0) / 2.0);
  for (int k = 0; k < 3; ++k) {
    C uk = u * std::pow(w, k);
    C z = std::abs(uk) < 1e-18 ? C(0) : uk - p / (3.0 * uk);
    roots.push_back(z - b / 3.0);
  }
  return roots;
}

// Split a rank-2 symmetric matrix into its two lines.
inline std::pair<Hom<C>, Hom<C>> split_line_pair(const Eigen::Matrix3cd& D) {
  // singular point: kernel of D
  Eigen::JacobiSVD<Eigen::Matrix3cd> svd(D, Eigen::ComputeFullV);
  Eigen::Vector3cd p = svd.matrixV().col(2);
  // generic transversal not through p: find two conic points on it
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::Vector3cd u = Eigen::Vector3cd::Zero(), v = Eigen::Vector3cd::Zero();
    u((attempt + 0) % 3) = 1.0;
    v((attempt + 1) % 3) = 1.0;
    u += 0.1 * attempt * Eigen::Vector3cd(C(0.3, 0.1), C(-0.2, 0.4), C(0.5, -0.3));
    C a = v.transpose() * D * v;
    C b = 2.0 * (u.transpose() * D * v)(0);
    C cc = u.transpose() * D * u;
    auto roots = solve_quadratic<C>(a, b, cc);
    if (roots.size() < 2) continue;
    Eigen::Vector3cd q1 = u + roots[0] * v, q2 = u + roots[1] * v;
    if (q1.norm() < 1e-10 || q2.norm() < 1e-10) continue;
    Hom<C> hp{p};
    Hom<C> hq1{q1}, hq2{q2};
    if (hq1.same(hp, 1e-8) || hq2.same(hp, 1e-8)) continue;
    auto l1 = join(hp, hq1);
    auto l2 = join(hp, hq2);
    return {l1, l2};
  }
  throw ConicError("could not split degenerate conic into lines");
}

}  // namespace detail

// All intersection points of two distinct smooth conics over C (up to 4,
// with multiplicity via root clustering at cluster_tol).
inline std::vector<Hom<std::complex<double>>> conic_intersect(
    const Conic<std::complex<double>>& A, const Conic<std::complex<double>>& B,
    double cluster_tol = 1e-7) {
  using C = std::complex<double>;
  if (A.same(B)) throw IdenticalConics();
  // degenerate member of the pencil A + t B: det cubic in t
  auto det_at = [&](C t) { return C((A.Q + t * B.Q).determinant()); };
  // expand det(A + tB) = d0 + d1 t + d2 t^2 + d3 t^3 by interpolation
  C f0 = det_at(C(0)), f1 = det_at(C(1)), fm1 = det_at(C(-1)), f2 = det_at(C(2));
  C d0 = f0;
  C d2 = (f1 + fm1) / 2.0 - f0;
  C d3 = (f2 - 3.0 * f1 + 3.0 * f0 - fm1) / 6.0;
  C d1 = f1 - f0 - d2 - d3;
  auto roots = detail::cubic_roots(d3, d2, d1, d0);
  if (roots.empty()) throw ConicError("pencil has no degenerate member");
  // use the best-conditioned degenerate member
  std::vector<Hom<C>> raw;
  for (C t : roots) {
    Eigen::Matrix3cd D = A.Q + t * B.Q;
    if (std::abs(D.determinant()) > 1e-6 * std::pow(D.norm(), 3)) continue;
    try {
      auto [l1, l2] = detail::split_line_pair(D);
      for (auto& l : {l1, l2})
        for (auto& p : line_conic_intersect(A, l)) raw.push_back(p);
    } catch (const ConicError&) {
      continue;
    }
    if (!raw.empty()) break;
  }
  if (raw.empty()) throw ConicError("conic intersection failed");
  // cluster projectively-equal points, keep multiplicity total 4
  std::vector<Hom<C>> unique;
  std::vector<int> mult;
  for (auto& p : raw) {
    bool merged = false;
    for (size_t i = 0; i < unique.size(); ++i)
      if (unique[i].same(p, cluster_tol)) {
        ++mult[i];
        merged = true;
        break;
      }
    if (!merged) {
      unique.push_back(p);
      mult.push_back(1);
    }
  }
  // each line meets A in 2 points; both lines of the pair give 4 with
  // multiplicity -- re-expand clustered output to multiplicity list
  std::vector<Hom<C>> out;
  for (size_t i = 0; i < unique.size(); ++i)
    for (int k = 0; k < mult[i]; ++k) out.push_back(unique[i]);
  return out;
}

struct CommonTangents {
  std::vector<Hom<std::complex<double>>> lines;  // 4 with multiplicity
  std::vector<bool> real_flag;
};

// Intersection of the dual conics: the 4 common tangent lines.
template <class K>
inline CommonTangents common_tangents(const Conic<K>& Q1, const Conic<K>& Q2) {
  using C = std::complex<double>;
  Conic<C> A, B;
  A.Q = Q1.adjugate().template cast<C>();
  B.Q = Q2.adjugate().template cast<C>();
  A.normalize();
  B.normalize();
  if (A.same(B)) throw IdenticalConics();
  CommonTangents out;
  out.lines = conic_intersect(A, B);
  for (auto& l : out.lines) {
    auto n = l.normalized().v;
    double im = 0;
    for (int i = 0; i < 3; ++i) im = std::max(im, std::abs(n(i).imag()));
    out.real_flag.push_back(im < 1e-7);
  }
  return out;
}

// --- conic file: 6 reals (or complex pairs) for ax^2+bxy+cy^2+dxz+eyz+fz^2 ---

template <class K>
inline void write_conic(std::ostream& os, const Conic<K>& c) {
  os.precision(17);
  const auto& Q = c.Q;
  K vals[6] = {Q(0, 0), K(2) * Q(0, 1), Q(1, 1), K(2) * Q(0, 2), K(2) * Q(1, 2), Q(2, 2)};
  for (int i = 0; i < 6; ++i) {
    if constexpr (std::is_same_v<K, std::complex<double>>)
      os << vals[i].real() << ' ' << vals[i].imag();
    else
      os << vals[i];
    os << (i + 1 < 6 ? ' ' : '\n');
  }
}

template <class K>
inline Conic<K> read_conic(std::istream& is) {
  K vals[6];
  for (int i = 0; i < 6; ++i) {
    if constexpr (std::is_same_v<K, std::complex<double>>) {
      double re, im;
      if (!(is >> re >> im)) throw ConicError("bad conic file");
      vals[i] = {re, im};
    } else {
      if (!(is >> vals[i])) throw ConicError("bad conic file");
    }
  }
  return Conic<K>::from_coeffs(vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]);
}

}  // namespace planegeo
