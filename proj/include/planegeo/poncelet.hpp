#pragma once

// Poncelet dynamics for a nested pair of real conics: the two involutions
// (swap tangents through a vertex, swap vertices on a chord), their
// composition, orbits with drift control, closure detection, and the
// rotation number through an angle parametrization of the outer conic.

#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "planegeo/conic.hpp"

namespace planegeo {

struct PonceletError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotTangentPair : PonceletError {
  NotTangentPair() : PonceletError("state is not an incident vertex/tangent pair") {}
};
struct DriftExceeded : PonceletError {
  DriftExceeded() : PonceletError("orbit drifted off the conic pair beyond tolerance") {}
};
struct NotNested : PonceletError {
  NotNested() : PonceletError("conics are not nested real ellipses") {}
};

using RConic = Conic<double>;
using RPoint = Hom<double>;
using RLine = Hom<double>;

// A vertex on the outer conic together with a tangent line of the inner one
// passing through it.
struct PonceletState {
  RPoint point;
  RLine line;

  double point_residual(const RConic& outer) const {
    auto p = point.normalized().v;
    return std::abs(p.transpose() * outer.Q * p) / outer.Q.norm();
  }
  double line_residual(const RConic& inner) const {
    auto l = line.normalized().v;
    return std::abs(l.transpose() * inner.adjugate() * l) / inner.adjugate().norm();
  }
  bool valid(const RConic& outer, const RConic& inner, double tol = 1e-9) const {
    return point_residual(outer) < tol && line_residual(inner) < tol &&
           incident(point, line, 1e-8);
  }
};

// Parametrization of a real ellipse by a congruence to the unit circle:
// diagonalize Q = S diag(l1, l2, -l3) S^T (li > 0 after orienting), then
// theta = atan2(sqrt(l2) v, sqrt(l1) u) with (u, v, w) = S^T p scaled to w = 1.
struct EllipseParam {
  Eigen::Matrix3d S;       // orthogonal
  Eigen::Vector3d lambda;  // (l1, l2, l3), all positive

  explicit EllipseParam(const RConic& outer) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(outer.Q);
    Eigen::Vector3d ev = es.eigenvalues();
    Eigen::Matrix3d V = es.eigenvectors();
    // signature must be (2,1) or (1,2); flip sign so two are positive
    int npos = (ev(0) > 0) + (ev(1) > 0) + (ev(2) > 0);
    if (npos == 1) {
      ev = -ev;
    } else if (npos != 2) {
      throw NotNested();
    }
    // order so the negative eigenvalue is last
    int neg = ev(0) < 0 ? 0 : (ev(1) < 0 ? 1 : 2);
    std::array<int, 3> order{(neg + 1) % 3, (neg + 2) % 3, neg};
    for (int i = 0; i < 3; ++i) {
      S.col(i) = V.col(order[i]);
      lambda(i) = std::abs(ev(order[i]));
    }
  }

  double theta(const RPoint& p) const {
    Eigen::Vector3d u = S.transpose() * p.normalized().v;
    if (std::abs(u(2)) < 1e-12) throw NotNested();
    u /= u(2);
    return std::atan2(std::sqrt(lambda(1)) * u(1), std::sqrt(lambda(0)) * u(0));
  }

  RPoint point(double theta) const {
    Eigen::Vector3d u(std::cos(theta) / std::sqrt(lambda(0)),
                      std::sin(theta) / std::sqrt(lambda(1)), 1.0 / std::sqrt(lambda(2)));
    return Hom<double>{S * u}.normalized();
  }
};

// Check the pair is a nested pair of real ellipses: both have real points,
// no real intersection, and the inner one lies in the interior of the outer.
inline void require_nested(const RConic& outer, const RConic& inner) {
  EllipseParam po(outer), pi(inner);  // throws NotNested if not real ellipses
  Conic<std::complex<double>> A, B;
  A.Q = outer.Q.cast<std::complex<double>>();
  B.Q = inner.Q.cast<std::complex<double>>();
  for (auto& p : conic_intersect(A, B)) {
    auto n = p.normalized().v;
    double im = 0;
    for (int i = 0; i < 3; ++i) im = std::max(im, std::abs(n(i).imag()));
    if (im < 1e-7) throw NotNested();
  }
  // inner points strictly interior to the outer conic: sign of the outer
  // form on them matches its sign at the inner "center" (pole of infinity)
  Eigen::Vector3d inf(0, 0, 1);
  for (int k = 0; k < 8; ++k) {
    auto q = pi.point(2 * M_PI * k / 8).normalized().v;
    double val = q.transpose() * outer.Q * q;
    Eigen::Vector3d c = outer.adjugate() * Eigen::Vector3d(0, 0, 1);
    double cval = (c / c.norm()).transpose() * outer.Q * (c / c.norm());
    if (val * cval <= 0) throw NotNested();
  }
}

// Involution fixing the vertex: swap the two tangents to the inner conic.
inline PonceletState iota_P(const RConic& outer, const RConic& inner, const PonceletState& s) {
  if (!s.valid(outer, inner)) throw NotTangentPair();
  auto tl = tangents_from(inner, s.point);
  if (tl.size() < 2) return s;  // vertex on the inner conic: fixed point
  // pick the tangent farther from the current line (Vieta partner)
  auto dist = [&](const RLine& a) {
    Eigen::Vector3d u = a.normalized().v, w = s.line.normalized().v;
    u /= u.norm();
    w /= w.norm();
    return std::min((u - w).norm(), (u + w).norm());
  };
  PonceletState out = s;
  out.line = dist(tl[0]) > dist(tl[1]) ? tl[0] : tl[1];
  return out;
}

// Involution fixing the chord: swap the two vertices on the outer conic.
inline PonceletState iota_L(const RConic& outer, const RConic& inner, const PonceletState& s) {
  if (!s.valid(outer, inner)) throw NotTangentPair();
  auto pts = line_conic_intersect(outer, s.line);
  if (pts.size() < 2) return s;
  auto dist = [&](const RPoint& a) {
    Eigen::Vector3d u = a.normalized().v, w = s.point.normalized().v;
    u /= u.norm();
    w /= w.norm();
    return std::min((u - w).norm(), (u + w).norm());
  };
  PonceletState out = s;
  out.point = dist(pts[0]) > dist(pts[1]) ? pts[0] : pts[1];
  return out;
}

namespace detail {

// Project a state back onto the variety: Newton step of the vertex along the
// conic gradient, then retake the nearest tangent through it.
inline PonceletState reproject(const RConic& outer, const RConic& inner,
                               const PonceletState& s) {
  PonceletState out = s;
  Eigen::Vector3d p = s.point.normalized().v;
  for (int it = 0; it < 4; ++it) {
    double f = p.transpose() * outer.Q * p;
    Eigen::Vector3d g = 2.0 * outer.Q * p;
    double gn = g.squaredNorm();
    if (gn < 1e-300) break;
    p -= (f / gn) * g;
  }
  out.point = Hom<double>{p}.normalized();
  auto tl = tangents_from(inner, out.point);
  auto dist = [&](const RLine& a) {
    Eigen::Vector3d u = a.normalized().v, w = s.line.normalized().v;
    u /= u.norm();
    w /= w.norm();
    return std::min((u - w).norm(), (u + w).norm());
  };
  if (tl.size() == 1 || (tl.size() == 2 && dist(tl[0]) <= dist(tl[1])))
    out.line = tl[0];
  else if (tl.size() == 2)
    out.line = tl[1];
  return out;
}

}  // namespace detail

// One step of the Poncelet map: other tangent through the vertex, then the
// other vertex on that tangent.
inline PonceletState poncelet_step(const RConic& outer, const RConic& inner,
                                   const PonceletState& s) {
  if (!s.valid(outer, inner)) throw NotTangentPair();
  return iota_L(outer, inner, iota_P(outer, inner, s));
}

// Build a valid initial state from a vertex on (or near) the outer conic.
inline PonceletState initial_state(const RConic& outer, const RConic& inner,
                                   const RPoint& vertex) {
  PonceletState s;
  s.point = vertex;
  s.line = join(vertex, Hom<double>::of(0, 0, 1));  // placeholder for reproject
  auto tl = tangents_from(inner, vertex);
  s.line = tl[0];
  s = detail::reproject(outer, inner, s);
  if (!s.valid(outer, inner)) throw NotTangentPair();
  return s;
}

struct Orbit {
  std::vector<PonceletState> states;  // states[0] = initial, size N+1
  double max_drift = 0;
};

inline Orbit orbit(const RConic& outer, const RConic& inner, const PonceletState& start,
                   int steps, double drift_tol = 1e-6) {
  Orbit o;
  o.states.push_back(start);
  PonceletState cur = start;
  for (int k = 0; k < steps; ++k) {
    cur = poncelet_step(outer, inner, cur);
    double drift = std::max(cur.point_residual(outer), cur.line_residual(inner));
    cur = detail::reproject(outer, inner, cur);
    o.max_drift = std::max(o.max_drift, drift);
    if (o.max_drift > drift_tol) throw DriftExceeded();
    o.states.push_back(cur);
  }
  return o;
}

struct ClosureResult {
  bool closed = false;
  int period = 0;       // smallest n with state_n = state_0, if closed
  double residual = 0;  // distance at the detected return
};

inline ClosureResult closure_detect(const RConic& outer, const RConic& inner,
                                    const PonceletState& start, int max_steps = 64,
                                    double tol = 1e-7) {
  auto close = [&](const PonceletState& a, const PonceletState& b) {
    Eigen::Vector3d pa = a.point.normalized().v, pb = b.point.normalized().v;
    Eigen::Vector3d la = a.line.normalized().v, lb = b.line.normalized().v;
    pa /= pa.norm(); pb /= pb.norm(); la /= la.norm(); lb /= lb.norm();
    double dp = std::min((pa - pb).norm(), (pa + pb).norm());
    double dl = std::min((la - lb).norm(), (la + lb).norm());
    return std::max(dp, dl);
  };
  PonceletState cur = start;
  ClosureResult r;
  for (int n = 1; n <= max_steps; ++n) {
    cur = detail::reproject(outer, inner, poncelet_step(outer, inner, cur));
    double d = close(cur, start);
    if (d < tol) {
      r.closed = true;
      r.period = n;
      r.residual = d;
      return r;
    }
  }
  return r;
}

struct RotationNumber {
  double value = 0;       // mean step angle / (2 pi)
  int steps = 0;
  double total_angle = 0; // lifted angle advance over the orbit
};

// Mean advance of the outer-conic angle per step, each increment wrapped to
// (0, 2 pi) so the lift is monotone.  The map orientation depends on the
// choice of initial tangent, so the result is normalized to (0, 1/2] by
// rho <-> 1 - rho (the unoriented rotation number).
inline RotationNumber rotation_number(const RConic& outer, const RConic& inner,
                                      const PonceletState& start, int steps = 256) {
  require_nested(outer, inner);
  EllipseParam par(outer);
  Orbit o = orbit(outer, inner, start, steps);
  double total = 0;
  double prev = par.theta(o.states[0].point);
  for (int k = 1; k < (int)o.states.size(); ++k) {
    double th = par.theta(o.states[k].point);
    double d = th - prev;
    while (d <= 0) d += 2 * M_PI;
    while (d > 2 * M_PI) d -= 2 * M_PI;
    total += d;
    prev = th;
  }
  RotationNumber r;
  r.steps = steps;
  r.total_angle = total;
  r.value = total / (2 * M_PI * steps);
  if (r.value > 0.5) r.value = 1.0 - r.value;
  return r;
}

inline void write_orbit_csv(std::ostream& os, const RConic& outer, const Orbit& o) {
  EllipseParam par(outer);
  os.precision(17);
  os << "step,theta,px,py,l0,l1,l2\n";
  for (size_t k = 0; k < o.states.size(); ++k) {
    auto p = o.states[k].point.normalized().v;
    auto l = o.states[k].line.normalized().v;
    double px = p(0) / p(2), py = p(1) / p(2);
    os << k << ',' << par.theta(o.states[k].point) << ',' << px << ',' << py << ','
       << l(0) << ',' << l(1) << ',' << l(2) << '\n';
  }
}

}  // namespace planegeo
