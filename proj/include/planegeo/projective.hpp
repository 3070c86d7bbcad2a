#pragma once

// Classical projective plane over R and C in homogeneous coordinates:
// join, meet, incidence, affine charts, axiom spot checks.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

namespace planegeo {

struct ProjectiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EqualArguments : ProjectiveError {
  EqualArguments() : ProjectiveError("join/meet arguments coincide up to scale") {}
};
struct OnAxisAtInfinity : ProjectiveError {
  OnAxisAtInfinity() : ProjectiveError("point lies on the line at infinity of the frame") {}
};

template <class K>
inline double mag(const K& x) {
  return std::abs(x);
}

// Homogeneous 3-vector up to nonzero scale.  Normalized representative has
// its largest-magnitude coordinate equal to 1.
template <class K>
struct Hom {
  Eigen::Matrix<K, 3, 1> v;

  static Hom of(K a, K b, K c) { return Hom{{a, b, c}}.normalized(); }

  Hom normalized() const {
    int idx = 0;
    double best = 0;
    for (int i = 0; i < 3; ++i)
      if (mag(v(i)) > best) {
        best = mag(v(i));
        idx = i;
      }
    if (best == 0) throw ProjectiveError("zero homogeneous vector");
    Hom r;
    r.v = v / v(idx);
    return r;
  }

  bool same(const Hom& o, double tol = 1e-9) const {
    Eigen::Matrix<K, 3, 1> a = normalized().v, b = o.normalized().v;
    return (a - b).norm() < tol || (a + b).norm() < tol;
  }
};

template <class K>
using HomPoint = Hom<K>;
template <class K>
using HomLine = Hom<K>;

template <class K>
inline Eigen::Matrix<K, 3, 1> cross3(const Eigen::Matrix<K, 3, 1>& a,
                                     const Eigen::Matrix<K, 3, 1>& b) {
  Eigen::Matrix<K, 3, 1> r;
  r << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
  return r;
}

template <class K>
inline bool incident(const Hom<K>& p, const Hom<K>& l, double tol = 1e-12) {
  auto pn = p.normalized().v, ln = l.normalized().v;
  return mag(K(pn(0) * ln(0) + pn(1) * ln(1) + pn(2) * ln(2))) < tol;
}

template <class K>
inline HomLine<K> join(const HomPoint<K>& p, const HomPoint<K>& q) {
  auto c = cross3<K>(p.normalized().v, q.normalized().v);
  if (c.norm() < 1e-12) throw EqualArguments();
  return Hom<K>{c}.normalized();
}

template <class K>
inline HomPoint<K> meet(const HomLine<K>& l, const HomLine<K>& m) {
  auto c = cross3<K>(l.normalized().v, m.normalized().v);
  if (c.norm() < 1e-12) throw EqualArguments();
  return Hom<K>{c}.normalized();
}

// Origin and the two points at infinity of the axes.
template <class K>
struct AffineFrame {
  HomPoint<K> O, X, Y;

  static AffineFrame standard() {
    return {Hom<K>::of(K(0), K(0), K(1)), Hom<K>::of(K(1), K(0), K(0)),
            Hom<K>::of(K(0), K(1), K(0))};
  }
};

// p_X = (pY)(0X), p_Y = (pX)(0Y); inverse p = (p_X Y)(p_Y X).
template <class K>
struct ChartImage {
  HomPoint<K> pX, pY;
};

template <class K>
inline ChartImage<K> affine_chart(const AffineFrame<K>& f, const HomPoint<K>& p) {
  HomLine<K> infinity = join(f.X, f.Y);
  if (incident(p, infinity, 1e-12)) throw OnAxisAtInfinity();
  HomLine<K> axisX = join(f.O, f.X), axisY = join(f.O, f.Y);
  ChartImage<K> out;
  out.pX = p.same(f.O) ? f.O : meet(join(p, f.Y), axisX);
  out.pY = p.same(f.O) ? f.O : meet(join(p, f.X), axisY);
  return out;
}

template <class K>
inline HomPoint<K> affine_chart_inverse(const AffineFrame<K>& f, const ChartImage<K>& c) {
  return meet(join(c.pX, f.Y), join(c.pY, f.X));
}

// dual chart: lines to pairs of points on the axes
template <class K>
inline ChartImage<K> dual_chart(const AffineFrame<K>& f, const HomLine<K>& l) {
  ChartImage<K> out;
  out.pX = meet(l, join(f.O, f.X));
  out.pY = meet(l, join(f.O, f.Y));
  return out;
}

template <class K>
inline HomLine<K> dual_chart_inverse(const ChartImage<K>& c) {
  return join(c.pX, c.pY);
}

namespace detail {
inline double draw(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}
template <class K>
K draw_scalar(std::mt19937_64& rng) {
  if constexpr (std::is_same_v<K, std::complex<double>>)
    return {draw(rng), draw(rng)};
  else
    return draw(rng);
}
}  // namespace detail

template <class K>
inline HomPoint<K> random_point(std::mt19937_64& rng) {
  for (;;) {
    Eigen::Matrix<K, 3, 1> v;
    for (int i = 0; i < 3; ++i) v(i) = detail::draw_scalar<K>(rng);
    if (v.norm() > 0.3) return Hom<K>{v}.normalized();
  }
}

struct AxiomReport {
  int trials = 0;
  int degenerate_skipped = 0;
  int violations = 0;
};

// Seeded spot-check of the projective plane axioms: unique joins/meets,
// and existence of 4 points in general position.
template <class K>
inline AxiomReport axiom_spotcheck(int trials, uint64_t seed) {
  if (trials < 1) throw ProjectiveError("trials must be >= 1");
  std::mt19937_64 rng(seed);
  AxiomReport rep;
  rep.trials = trials;
  for (int i = 0; i < trials; ++i) {
    auto p = random_point<K>(rng), q = random_point<K>(rng), r = random_point<K>(rng);
    // condition-number threshold: skip near-degenerate draws
    Eigen::Matrix<K, 3, 3> m;
    m.col(0) = p.v;
    m.col(1) = q.v;
    m.col(2) = r.v;
    if (mag(K(m.determinant())) < 1e-9) {
      ++rep.degenerate_skipped;
      continue;
    }
    auto l1 = join(p, q), l2 = join(p, r);
    if (!incident(p, l1, 1e-10) || !incident(q, l1, 1e-10)) ++rep.violations;
    auto back = meet(l1, l2);
    if (!back.same(p, 1e-8)) ++rep.violations;
  }
  // 4 points in general position exist (standard frame plus unit point)
  auto e0 = Hom<K>::of(K(1), K(0), K(0)), e1 = Hom<K>::of(K(0), K(1), K(0));
  auto e2 = Hom<K>::of(K(0), K(0), K(1)), u = Hom<K>::of(K(1), K(1), K(1));
  Hom<K> quad[4] = {e0, e1, e2, u};
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c) {
        Eigen::Matrix<K, 3, 3> m;
        m.col(0) = quad[a].v;
        m.col(1) = quad[b].v;
        m.col(2) = quad[c].v;
        if (mag(K(m.determinant())) < 1e-12) ++rep.violations;
      }
  return rep;
}

// Seeded sample of 5 points with every triple having |det| > 1e-6.
template <class K>
inline std::array<HomPoint<K>, 5> general_position_5(uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (;;) {
    std::array<HomPoint<K>, 5> pts;
    for (auto& p : pts) p = random_point<K>(rng);
    bool ok = true;
    for (int a = 0; a < 5 && ok; ++a)
      for (int b = a + 1; b < 5 && ok; ++b)
        for (int c = b + 1; c < 5 && ok; ++c) {
          Eigen::Matrix<K, 3, 3> m;
          m.col(0) = pts[a].normalized().v;
          m.col(1) = pts[b].normalized().v;
          m.col(2) = pts[c].normalized().v;
          if (mag(K(m.determinant())) <= 1e-6) ok = false;
        }
    if (ok) return pts;
  }
}

// --- serialization: "(a : b : c)" --------------------------------------------

inline std::string format_scalar(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

inline std::string format_scalar(const std::complex<double>& z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real();
  if (z.imag() >= 0)
    os << "+" << z.imag() << "i";
  else
    os << z.imag() << "i";
  return os.str();
}

template <class K>
inline std::string to_string(const Hom<K>& h) {
  auto n = h.normalized().v;
  return "(" + format_scalar(n(0)) + " : " + format_scalar(n(1)) + " : " +
         format_scalar(n(2)) + ")";
}

}  // namespace planegeo
