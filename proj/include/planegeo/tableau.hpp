#pragma once

// Tableaux: bilinear maps U (x) V -> W stored as 3-index tensors
// t^mu_{nu sigma}, with t(u,v)^mu = t^mu_{nu sigma} u^nu v^sigma.
// Classical tableaux come from right multiplication in R, C, H, O.

#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace planegeo {

struct TableauError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotSquare : TableauError {
  NotSquare() : TableauError("tableau is not square") {}
};
struct BadDimension : TableauError {
  BadDimension() : TableauError("triality queries need dimension 1, 2, 4 or 8") {}
};
struct SingularMatrix : TableauError {
  using TableauError::TableauError;
};

class Tableau3 {
public:
  Tableau3(int nU, int nV, int nW)
      : nU_(nU), nV_(nV), nW_(nW), data_(static_cast<size_t>(nU) * nV * nW, 0.0) {
    if (nU < 1 || nV < 1 || nW < 1) throw TableauError("dimensions must be positive");
  }

  int dimU() const { return nU_; }
  int dimV() const { return nV_; }
  int dimW() const { return nW_; }
  bool square() const { return nU_ == nV_ && nV_ == nW_; }

  double& at(int mu, int nu, int sigma) { return data_[index(mu, nu, sigma)]; }
  double at(int mu, int nu, int sigma) const { return data_[index(mu, nu, sigma)]; }

  // Matrix of t_u : V -> W, (t_u)^mu_sigma = t^mu_{nu sigma} u^nu.
  Eigen::MatrixXd contractU(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nW_, nV_);
    for (int mu = 0; mu < nW_; ++mu)
      for (int sigma = 0; sigma < nV_; ++sigma) {
        double s = 0;
        for (int nu = 0; nu < nU_; ++nu) s += at(mu, nu, sigma) * u(nu);
        m(mu, sigma) = s;
      }
    return m;
  }

  // Matrix of u -> t(u, v), columns indexed by nu.
  Eigen::MatrixXd contractV(const Eigen::VectorXd& v) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nW_, nU_);
    for (int mu = 0; mu < nW_; ++mu)
      for (int nu = 0; nu < nU_; ++nu) {
        double s = 0;
        for (int sigma = 0; sigma < nV_; ++sigma) s += at(mu, nu, sigma) * v(sigma);
        m(mu, nu) = s;
      }
    return m;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return contractU(u) * v;
  }

  double maxAbs() const {
    double m = 0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  friend bool operator==(const Tableau3& a, const Tableau3& b) {
    return a.nU_ == b.nU_ && a.nV_ == b.nV_ && a.nW_ == b.nW_ && a.data_ == b.data_;
  }

private:
  size_t index(int mu, int nu, int sigma) const {
    return (static_cast<size_t>(mu) * nU_ + nu) * nV_ + sigma;
  }
  int nU_, nV_, nW_;
  std::vector<double> data_;
};

// Swap the two input slots: t*(v,u) = t(u,v).
inline Tableau3 dual_tableau(const Tableau3& t) {
  Tableau3 d(t.dimV(), t.dimU(), t.dimW());
  for (int mu = 0; mu < t.dimW(); ++mu)
    for (int nu = 0; nu < t.dimU(); ++nu)
      for (int sigma = 0; sigma < t.dimV(); ++sigma)
        d.at(mu, sigma, nu) = t.at(mu, nu, sigma);
  return d;
}

// (g.t)(u,v) = gW t(gU^-1 u, gV^-1 v).
inline Tableau3 isotopy_transform(const Tableau3& t, const Eigen::MatrixXd& gU,
                                  const Eigen::MatrixXd& gV, const Eigen::MatrixXd& gW) {
  if (gU.rows() != t.dimU() || gV.rows() != t.dimV() || gW.rows() != t.dimW() ||
      gU.rows() != gU.cols() || gV.rows() != gV.cols() || gW.rows() != gW.cols())
    throw TableauError("isotopy matrix sizes do not match tableau dims");
  auto check_invert = [](const Eigen::MatrixXd& g, const char* name) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
    if (!lu.isInvertible()) throw SingularMatrix(std::string("singular isotopy matrix ") + name);
    return lu.inverse();
  };
  Eigen::MatrixXd iU = check_invert(gU, "gU");
  Eigen::MatrixXd iV = check_invert(gV, "gV");
  Tableau3 r(t.dimU(), t.dimV(), t.dimW());
  // s^mu_{nu sigma} = gW^mu_a t^a_{bc} iU^b_nu iV^c_sigma
  for (int mu = 0; mu < t.dimW(); ++mu)
    for (int nu = 0; nu < t.dimU(); ++nu)
      for (int sigma = 0; sigma < t.dimV(); ++sigma) {
        double s = 0;
        for (int a = 0; a < t.dimW(); ++a)
          for (int b = 0; b < t.dimU(); ++b)
            for (int c = 0; c < t.dimV(); ++c)
              s += gW(mu, a) * t.at(a, b, c) * iU(b, nu) * iV(c, sigma);
        r.at(mu, nu, sigma) = s;
      }
  return r;
}

namespace detail {

// Cayley-Dickson structure constants: dimension 1, 2, 4, 8 with e0 the
// identity. mult(d) gives c[i][j] = e_i * e_j as a coordinate vector.
inline std::vector<std::vector<Eigen::VectorXd>> cayley_dickson(int dim) {
  std::vector<std::vector<Eigen::VectorXd>> c(1, std::vector<Eigen::VectorXd>(1));
  c[0][0] = Eigen::VectorXd::Ones(1);
  int n = 1;
  while (n < dim) {
    int m = 2 * n;
    std::vector<std::vector<Eigen::VectorXd>> d(m, std::vector<Eigen::VectorXd>(m));
    auto conj = [&](const Eigen::VectorXd& a) {
      Eigen::VectorXd r = -a;
      r(0) = a(0);
      return r;
    };
    // (a,b)(c,e) = (ac - e~ b, ea + b c~)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n), b = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd cc = Eigen::VectorXd::Zero(n), e = Eigen::VectorXd::Zero(n);
        (i < n ? a : b)(i % n) = 1.0;
        (j < n ? cc : e)(j % n) = 1.0;
        auto mul = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
          Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              if (x(p) != 0.0 && y(q) != 0.0) r += x(p) * y(q) * c[p][q];
          return r;
        };
        Eigen::VectorXd first = mul(a, cc) - mul(conj(e), b);
        Eigen::VectorXd second = mul(e, a) + mul(b, conj(cc));
        Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
        r.head(n) = first;
        r.tail(n) = second;
        d[i][j] = r;
      }
    c = std::move(d);
    n = m;
  }
  return c;
}

}  // namespace detail

enum class AlgebraKind { R, C, H, O };

inline int algebra_dimension(AlgebraKind k) {
  switch (k) {
    case AlgebraKind::R: return 1;
    case AlgebraKind::C: return 2;
    case AlgebraKind::H: return 4;
    case AlgebraKind::O: return 8;
  }
  return 0;
}

// t_u = R_u (right multiplication): t(u,v) = v * u in the algebra basis.
inline Tableau3 classical_tableau(AlgebraKind kind) {
  int n = algebra_dimension(kind);
  auto mult = detail::cayley_dickson(n);
  Tableau3 t(n, n, n);
  for (int nu = 0; nu < n; ++nu)
    for (int sigma = 0; sigma < n; ++sigma) {
      Eigen::VectorXd prod = mult[sigma][nu];  // v * u with v = e_sigma, u = e_nu
      for (int mu = 0; mu < n; ++mu) t.at(mu, nu, sigma) = prod(mu);
    }
  return t;
}

// --- text format -----------------------------------------------------------
// first line: "dims nW nU nV", then one "mu nu sigma value" line per nonzero.

inline void write_tableau(std::ostream& os, const Tableau3& t) {
  os << "dims " << t.dimW() << ' ' << t.dimU() << ' ' << t.dimV() << '\n';
  std::ostringstream fmt;
  fmt.precision(17);
  for (int mu = 0; mu < t.dimW(); ++mu)
    for (int nu = 0; nu < t.dimU(); ++nu)
      for (int sigma = 0; sigma < t.dimV(); ++sigma)
        if (t.at(mu, nu, sigma) != 0.0) {
          fmt.str("");
          fmt << mu << ' ' << nu << ' ' << sigma << ' ' << t.at(mu, nu, sigma) << '\n';
          os << fmt.str();
        }
}

inline Tableau3 read_tableau(std::istream& is) {
  std::string word;
  if (!(is >> word) || word != "dims") throw TableauError("expected 'dims' header");
  int nW, nU, nV;
  if (!(is >> nW >> nU >> nV)) throw TableauError("bad dims line");
  Tableau3 t(nU, nV, nW);
  std::set<std::array<int, 3>> seen;
  int mu, nu, sigma;
  double value;
  while (is >> mu >> nu >> sigma >> value) {
    if (mu < 0 || mu >= nW || nu < 0 || nu >= nU || sigma < 0 || sigma >= nV)
      throw TableauError("entry index out of range");
    if (!seen.insert({mu, nu, sigma}).second) throw TableauError("duplicate tableau entry");
    if (!std::isfinite(value)) throw TableauError("non-finite tableau entry");
    t.at(mu, nu, sigma) = value;
  }
  return t;
}

}  // namespace planegeo
