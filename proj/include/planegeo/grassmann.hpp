#pragma once

// Gluck-Warner coordinates on oriented 2-planes in R^4: self-dual /
// anti-self-dual splitting, intersection pairing, contracting-field
// estimates and the numerical magnification map.

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace planegeo {

struct GrassmannError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DependentVectors : GrassmannError {
  DependentVectors() : GrassmannError("plane basis vectors are dependent") {}
};
struct TooFewSamples : GrassmannError {
  TooFewSamples() : GrassmannError("contracting field needs at least 2 samples") {}
};
struct NotContracting : GrassmannError {
  NotContracting() : GrassmannError("field has Lipschitz constant >= 1") {}
};
struct NoConvergenceGW : GrassmannError {
  double best_residual;
  explicit NoConvergenceGW(double r)
      : GrassmannError("magnification iteration did not converge"), best_residual(r) {}
};

// 2-form on oriented Euclidean R^4 on the basis e12, e13, e14, e23, e24, e34.
struct TwoForm4 {
  Eigen::Matrix<double, 6, 1> c = Eigen::Matrix<double, 6, 1>::Zero();

  double& e12() { return c(0); }
  double& e13() { return c(1); }
  double& e14() { return c(2); }
  double& e23() { return c(3); }
  double& e24() { return c(4); }
  double& e34() { return c(5); }

  // (w ^ w') / dV, the signature (3,3) wedge pairing
  double wedge(const TwoForm4& o) const {
    return c(0) * o.c(5) + c(5) * o.c(0) - c(1) * o.c(4) - c(4) * o.c(1) + c(2) * o.c(3) +
           c(3) * o.c(2);
  }

  double norm() const { return c.norm(); }
};

// coordinates in the orthonormal frames
//   sp^1 = (e12+e34)/s2, sp^2 = (e13-e24)/s2, sp^3 = (e14+e23)/s2
//   sm^1 = (e12-e34)/s2, sm^2 = (e13+e24)/s2, sm^3 = (e14-e23)/s2
struct SDSplit {
  Eigen::Vector3d X, Y;
};

inline SDSplit split_sd(const TwoForm4& w) {
  const double s = 1.0 / std::sqrt(2.0);
  SDSplit r;
  r.X << s * (w.c(0) + w.c(5)), s * (w.c(1) - w.c(4)), s * (w.c(2) + w.c(3));
  r.Y << s * (w.c(0) - w.c(5)), s * (w.c(1) + w.c(4)), s * (w.c(2) - w.c(3));
  return r;
}

inline TwoForm4 from_sd(const Eigen::Vector3d& X, const Eigen::Vector3d& Y) {
  const double s = 1.0 / std::sqrt(2.0);
  TwoForm4 w;
  w.c(0) = s * (X(0) + Y(0));
  w.c(5) = s * (X(0) - Y(0));
  w.c(1) = s * (X(1) + Y(1));
  w.c(4) = s * (Y(1) - X(1));
  w.c(2) = s * (X(2) + Y(2));
  w.c(3) = s * (X(2) - Y(2));
  return w;
}

// Oriented 2-plane as a pair of unit sphere points (decomposable unit forms
// have |X| = |Y| = 1/sqrt(2); both halves are rescaled to unit vectors).
struct SpherePair {
  Eigen::Vector3d xplus, yminus;
};

inline TwoForm4 wedge_of_covectors(const Eigen::Vector4d& xi, const Eigen::Vector4d& eta) {
  TwoForm4 w;
  int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (int k = 0; k < 6; ++k)
    w.c(k) = xi(pairs[k][0]) * eta(pairs[k][1]) - xi(pairs[k][1]) * eta(pairs[k][0]);
  return w;
}

// Annihilator of the plane, oriented so that (basis, annihilator basis) is a
// positively oriented frame of R^4.
inline SpherePair plane_to_spheres(const Eigen::Vector4d& v1, const Eigen::Vector4d& v2) {
  Eigen::Vector4d a = v1;
  if (a.norm() < 1e-12) throw DependentVectors();
  a.normalize();
  Eigen::Vector4d b = v2 - v2.dot(a) * a;
  if (b.norm() < 1e-10 * std::max(1.0, v2.norm())) throw DependentVectors();
  b.normalize();
  // complete (a, b) to an oriented orthonormal frame (a, b, c, d)
  Eigen::Matrix4d M;
  M.col(0) = a;
  M.col(1) = b;
  int found = 0;
  for (int k = 0; k < 4 && found < 2; ++k) {
    Eigen::Vector4d e = Eigen::Vector4d::Unit(k);
    for (int c = 0; c < 2 + found; ++c) e -= e.dot(M.col(c)) * M.col(c);
    if (e.norm() > 1e-6) {
      M.col(2 + found) = e.normalized();
      ++found;
    }
  }
  if (found < 2) throw DependentVectors();
  if (M.determinant() < 0) M.col(3) = -M.col(3);
  TwoForm4 w = wedge_of_covectors(M.col(2), M.col(3));
  SDSplit s = split_sd(w);
  SpherePair p;
  p.xplus = (std::sqrt(2.0) * s.X).normalized();
  p.yminus = (std::sqrt(2.0) * s.Y).normalized();
  return p;
}

inline TwoForm4 spheres_to_form(const SpherePair& p) {
  const double s = 1.0 / std::sqrt(2.0);
  return from_sd(s * p.xplus, s * p.yminus);
}

struct PairingResult {
  int sign = 0;
  double value = 0;  // xplus.xplus' - yminus.yminus'
};

inline PairingResult pairing_sign(const SpherePair& a, const SpherePair& b) {
  PairingResult r;
  r.value = a.xplus.dot(b.xplus) - a.yminus.dot(b.yminus);
  if (std::abs(r.value) < 1e-12)
    r.sign = 0;
  else
    r.sign = r.value > 0 ? 1 : -1;
  return r;
}

inline double great_circle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Sampled graph of a map S^- -> S^+.
struct ContractingField {
  enum class Provenance { FromChart, Synthetic };
  struct Sample {
    Eigen::Vector3d yminus, xplus;
  };
  std::vector<Sample> samples;
  Provenance provenance = Provenance::Synthetic;

  // graph property: no two samples nearly share yminus but differ in xplus
  bool graph_valid(double ytol = 1e-9) const {
    for (size_t i = 0; i < samples.size(); ++i)
      for (size_t j = i + 1; j < samples.size(); ++j)
        if (great_circle(samples[i].yminus, samples[j].yminus) < ytol &&
            great_circle(samples[i].xplus, samples[j].xplus) >= ytol)
          return false;
    return true;
  }

  // spherical inverse-distance interpolation on the 4 nearest samples
  Eigen::Vector3d interpolate(const Eigen::Vector3d& y) const {
    if (samples.empty()) throw TooFewSamples();
    std::vector<std::pair<double, size_t>> d;
    d.reserve(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) d.push_back({great_circle(samples[i].yminus, y), i});
    size_t k = std::min<size_t>(4, d.size());
    std::partial_sort(d.begin(), d.begin() + k, d.end());
    if (d[0].first < 1e-12) return samples[d[0].second].xplus;
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < k; ++i) acc += samples[d[i].second].xplus / d[i].first;
    double n = acc.norm();
    if (n < 1e-12) throw GrassmannError("interpolation degenerate");
    return acc / n;
  }
};

struct LipschitzEstimate {
  double L = 0;
  size_t worst_i = 0, worst_j = 0;
};

inline LipschitzEstimate lipschitz_estimate(const ContractingField& f) {
  if (f.samples.size() < 2) throw TooFewSamples();
  LipschitzEstimate out;
  for (size_t i = 0; i < f.samples.size(); ++i)
    for (size_t j = i + 1; j < f.samples.size(); ++j) {
      double dy = great_circle(f.samples[i].yminus, f.samples[j].yminus);
      if (dy < 1e-6) continue;
      double dx = great_circle(f.samples[i].xplus, f.samples[j].xplus);
      if (dx / dy > out.L) {
        out.L = dx / dy;
        out.worst_i = i;
        out.worst_j = j;
      }
    }
  return out;
}

// Magnification: the sphere pair of the plane of the field containing v.
// Damped descent of the misalignment angle over y in S^-.
inline SpherePair line_through_vector(const ContractingField& f, const Eigen::Vector4d& v,
                                      double* residual_out = nullptr) {
  if (f.samples.size() >= 2) {
    auto lip = lipschitz_estimate(f);
    if (lip.L >= 1.0) throw NotContracting();
  }
  Eigen::Vector4d vn = v;
  if (vn.norm() < 1e-14) throw GrassmannError("zero vector has no line");
  vn.normalize();
  // residual: angle between v and the plane of (f(y), y)
  auto defect = [&](const Eigen::Vector3d& y) {
    SpherePair p{f.interpolate(y), y};
    TwoForm4 w = spheres_to_form(p);
    // v hook (xi ^ eta): for unit decomposable w, |v hook w| = sin(angle)
    Eigen::Vector4d hooked;
    // (v hook w)_j = sum_i v_i w_{ij} with w antisymmetric matrix from components
    Eigen::Matrix4d W = Eigen::Matrix4d::Zero();
    W(0, 1) = w.c(0); W(0, 2) = w.c(1); W(0, 3) = w.c(2);
    W(1, 2) = w.c(3); W(1, 3) = w.c(4); W(2, 3) = w.c(5);
    W -= W.transpose().eval();
    hooked = W.transpose() * vn;
    return std::asin(std::clamp(hooked.norm(), 0.0, 1.0));
  };
  // coarse initialization over a Fibonacci sphere grid
  Eigen::Vector3d best;
  double bestVal = std::numeric_limits<double>::infinity();
  const int grid = 512;
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < grid; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / grid;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    Eigen::Vector3d y(r * std::cos(ga * k), r * std::sin(ga * k), z);
    double d = defect(y);
    if (d < bestVal) {
      bestVal = d;
      best = y;
    }
  }
  // damped tangent-plane descent with numerical gradient
  Eigen::Vector3d y = best;
  double val = bestVal;
  double step = 0.2;
  const double h = 1e-5;
  for (int it = 0; it < 200 && val >= 1e-8; ++it) {
    Eigen::Vector3d t1 = y.unitOrthogonal();
    Eigen::Vector3d t2 = y.cross(t1);
    auto move = [&](const Eigen::Vector3d& dir, double s) {
      return (y + s * dir).normalized().eval();
    };
    double g1 = (defect(move(t1, h)) - defect(move(t1, -h))) / (2 * h);
    double g2 = (defect(move(t2, h)) - defect(move(t2, -h))) / (2 * h);
    Eigen::Vector3d grad = g1 * t1 + g2 * t2;
    if (grad.norm() < 1e-14) break;
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt) {
      Eigen::Vector3d cand = move(-grad.normalized(), step);
      double cv = defect(cand);
      if (cv < val) {
        y = cand;
        val = cv;
        moved = true;
        step = std::min(step * 1.5, 0.5);
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (residual_out) *residual_out = val;
  if (val >= 1e-8) throw NoConvergenceGW(val);
  return SpherePair{f.interpolate(y), y};
}

// --- file format: lines "y1 y2 y3 x1 x2 x3" ----------------------------------

inline void write_field(std::ostream& os, const ContractingField& f) {
  os.precision(17);
  for (auto& s : f.samples)
    os << s.yminus(0) << ' ' << s.yminus(1) << ' ' << s.yminus(2) << ' ' << s.xplus(0) << ' '
       << s.xplus(1) << ' ' << s.xplus(2) << '\n';
}

inline ContractingField read_field(std::istream& is) {
  ContractingField f;
  double y1, y2, y3, x1, x2, x3;
  while (is >> y1 >> y2 >> y3 >> x1 >> x2 >> x3) {
    ContractingField::Sample s{{y1, y2, y3}, {x1, x2, x3}};
    if (std::abs(s.yminus.norm() - 1.0) > 1e-9 || std::abs(s.xplus.norm() - 1.0) > 1e-9)
      throw GrassmannError("field sample not on the unit spheres");
    f.samples.push_back(s);
  }
  if (!f.graph_valid()) throw GrassmannError("field file violates the graph property");
  return f;
}

}  // namespace planegeo
