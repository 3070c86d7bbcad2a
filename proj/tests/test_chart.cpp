#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "planegeo/chart_expr.hpp"
#include "planegeo/chart_geometry.hpp"
#include "planegeo/triality.hpp"

using namespace planegeo;

namespace {

const char* kClassical =
    "dim 2\n"
    "Y1 = y1 - (X1*x1 - X2*x2)\n"
    "Y2 = y2 - (X1*x2 + X2*x1)\n";

const char* kComponentwise =
    "dim 2\n"
    "Y1 = y1 - X1*x1\n"
    "Y2 = y2 - X2*x2\n";

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("parser accepts the documented charts and rejects bad indices") {
  auto c1 = parse_chart("dim 1\nY1 = y1 - X1*x1\n");
  CHECK(c1.n == 1);
  auto c2 = parse_chart(kClassical);
  CHECK(c2.n == 2);
  CHECK_THROWS_AS(parse_chart("dim 2\nY1 = y3\nY2 = y2\n"), IndexOutOfRange);
  CHECK_THROWS_AS(parse_chart("dim 1\nY1 = y1 +\n"), SyntaxError);
}

TEST_CASE("parser round-trips through pretty printing") {
  auto c = parse_chart(kClassical);
  auto again = parse_chart(c.pretty());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 1);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x = vec2(g(rng), g(rng)), y = vec2(g(rng), g(rng)), X = vec2(g(rng), g(rng));
    auto a = c.eval(x, y, X), b = again.eval(x, y, X);
    for (int i = 0; i < 2; ++i) CHECK(a[i].v == doctest::Approx(b[i].v).epsilon(1e-14));
  }
}

TEST_CASE("AD first and second partials on the n=1 bilinear chart") {
  auto c = parse_chart("dim 1\nY1 = y1 - X1*x1\n");
  Eigen::VectorXd x(1), y(1), X(1);
  x << 2;
  y << 3;
  X << 5;
  Jet j = c.eval(x, y, X)[0];
  // slots: x -> 0, y -> 1, X -> 2 (n = 1)
  CHECK(j.v == doctest::Approx(3 - 10));
  CHECK(j.g(0) == doctest::Approx(-5.0));  // dY/dx
  CHECK(j.g(1) == doctest::Approx(1.0));   // dY/dy
  CHECK(j.h(0, 2) == doctest::Approx(-1.0));  // d2Y/dx dX
}

TEST_CASE("classical chart mixed second partials") {
  auto c = parse_chart(kClassical);
  Eigen::VectorXd x = vec2(0.3, -0.2), y = vec2(0.1, 0.4), X = vec2(-0.5, 0.7);
  auto jets = c.eval(x, y, X);
  // slot layout: x in [0,2), y in [2,4), X in [4,6)
  CHECK(jets[0].h(0, 4) == doctest::Approx(-1.0));  // d2Y1/dx1 dX1
  CHECK(jets[0].h(1, 5) == doctest::Approx(+1.0));  // d2Y1/dx2 dX2
}

TEST_CASE("sin chart second partial at the origin") {
  auto c = parse_chart("dim 1\nY1 = y1 - sin(X1*x1)\n");
  Eigen::VectorXd z(1);
  z << 0;
  auto j = c.eval(z, z, z)[0];
  CHECK(j.h(0, 2) == doctest::Approx(-1.0));
}

TEST_CASE("AD agrees with central differences on random charts") {
  const char* charts[] = {
      "dim 1\nY1 = y1 - X1*x1 + 0.3*sin(x1*y1)\n",
      "dim 1\nY1 = y1 - exp(0.2*X1)*x1 + cos(x1)\n",
      "dim 2\nY1 = y1 - (X1*x1 - X2*x2) + 0.1*x1*x2\nY2 = y2 - (X1*x2 + X2*x1)\n",
  };
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0, 0.3);
  for (const char* text : charts) {
    auto c = parse_chart(text);
    int n = c.n;
    for (int trial = 0; trial < 30; ++trial) {
      Eigen::VectorXd x(n), y(n), X(n);
      for (int i = 0; i < n; ++i) {
        x(i) = g(rng);
        y(i) = g(rng);
        X(i) = g(rng);
      }
      auto jets = c.eval(x, y, X);
      double h = 1e-5;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Eigen::VectorXd xp = x, xm = x;
          xp(j) += h;
          xm(j) -= h;
          double fd = (c.eval(xp, y, X)[i].v - c.eval(xm, y, X)[i].v) / (2 * h);
          CHECK(jets[i].g(j) ==
                doctest::Approx(fd).epsilon(1e-6).scale(std::max(1.0, std::abs(fd))));
          // mixed second d2/dx_j dX_j by difference of AD gradients
          Eigen::VectorXd Xp = X, Xm = X;
          Xp(j) += h;
          Xm(j) -= h;
          double fd2 = (c.eval(x, y, Xp)[i].g(j) - c.eval(x, y, Xm)[i].g(j)) / (2 * h);
          CHECK(jets[i].h(j, 2 * n + j) ==
                doctest::Approx(fd2).epsilon(1e-5).scale(std::max(1.0, std::abs(fd2))));
        }
      }
    }
  }
}

TEST_CASE("division by a tiny denominator raises DomainError") {
  auto c = parse_chart("dim 1\nY1 = y1 / x1\n");
  Eigen::VectorXd z(1), one(1);
  z << 0;
  one << 1;
  CHECK_THROWS_AS(c.eval(z, one, z), DomainError);
}

TEST_CASE("solve_y on the classical chart") {
  auto c = parse_chart(kClassical);
  // x = 0 -> y = Y
  Eigen::VectorXd x = vec2(0, 0), X = vec2(0.3, -0.8), Y = vec2(0.6, 0.2);
  Eigen::VectorXd y = solve_y(c, x, X, Y, vec2(0, 0));
  CHECK(y(0) == doctest::Approx(Y(0)).epsilon(1e-12));
  CHECK(y(1) == doctest::Approx(Y(1)).epsilon(1e-12));

  // random flags: y = X x + Y as complex numbers
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0, 1);
  for (int k = 0; k < 50; ++k) {
    x = vec2(g(rng), g(rng));
    X = vec2(g(rng), g(rng));
    Y = vec2(g(rng), g(rng));
    y = solve_y(c, x, X, Y, vec2(0, 0));
    std::complex<double> cx(x(0), x(1)), cX(X(0), X(1)), cY(Y(0), Y(1));
    auto cy = cX * cx + cY;
    CHECK(y(0) == doctest::Approx(cy.real()).epsilon(1e-10));
    CHECK(y(1) == doctest::Approx(cy.imag()).epsilon(1e-10));
  }
}

TEST_CASE("chart with dY/dy = 0 raises SingularJacobian") {
  auto c = parse_chart("dim 1\nY1 = x1\n");
  Eigen::VectorXd z(1), t(1);
  z << 0.5;
  t << 0.9;  // unreachable target so Newton must use the (singular) Jacobian
  CHECK_THROWS_AS(solve_y(c, z, z, t, z), SingularJacobian);
}

TEST_CASE("classical chart tableau equals the complex multiplication tableau") {
  // Convention note: with the canonical coordinate formula the classical
  // chart lands exactly on the algebra tableau (overall sign +1 here).
  auto c = parse_chart(kClassical);
  Tableau3 cm = classical_tableau(AlgebraKind::C);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0, 0.4);
  for (int k = 0; k < 16; ++k) {
    Eigen::VectorXd x = vec2(g(rng), g(rng)), X = vec2(g(rng), g(rng));
    Eigen::VectorXd y = solve_y(c, x, X, vec2(g(rng), g(rng)), vec2(0, 0));
    auto jet = tableau_at(c, x, y, X);
    for (int mu = 0; mu < 2; ++mu)
      for (int nu = 0; nu < 2; ++nu)
        for (int sg = 0; sg < 2; ++sg)
          CHECK(jet.tableau.at(mu, nu, sg) ==
                doctest::Approx(cm.at(mu, nu, sg)).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("n=1 bilinear chart gives the scalar tableau 1") {
  auto c = parse_chart("dim 1\nY1 = y1 - X1*x1\n");
  Eigen::VectorXd x(1), X(1), Y(1);
  x << 0.4;
  X << -0.3;
  Y << 0.2;
  Eigen::VectorXd y = solve_y(c, x, X, Y, Y);
  auto jet = tableau_at(c, x, y, X);
  CHECK(jet.tableau.at(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("componentwise chart is diagonal and not a triality") {
  auto c = parse_chart(kComponentwise);
  Eigen::VectorXd x = vec2(0.2, -0.1), X = vec2(0.3, 0.5);
  Eigen::VectorXd y = solve_y(c, x, X, vec2(0.1, 0.2), vec2(0, 0));
  auto jet = tableau_at(c, x, y, X);
  CHECK(std::abs(jet.tableau.at(0, 1, 1)) < 1e-5);
  CHECK(std::abs(jet.tableau.at(1, 0, 0)) < 1e-5);
  CHECK_FALSE(is_triality(jet.tableau, 1e-6).verdict);
}

TEST_CASE("regularity margins: classical 1, componentwise 0") {
  auto cl = parse_chart(kClassical);
  Eigen::VectorXd x = vec2(0.1, 0.2), X = vec2(-0.3, 0.4);
  Eigen::VectorXd y = solve_y(cl, x, X, vec2(0.2, -0.1), vec2(0, 0));
  auto m = regularity_margin(cl, x, y, X);
  CHECK(m.margin == doctest::Approx(1.0).epsilon(1e-4));

  auto cw = parse_chart(kComponentwise);
  y = solve_y(cw, x, X, vec2(0.2, -0.1), vec2(0, 0));
  auto m2 = regularity_margin(cw, x, y, X);
  CHECK(m2.margin == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("blended chart margin decreases monotonically with the bump") {
  Eigen::VectorXd x = vec2(0.15, 0.1), X = vec2(0.2, -0.1);
  double prev = 2.0;
  for (double eps : {0.0, 2.0, 10.0}) {
    std::ostringstream text;
    text << "dim 2\n"
         << "Y1 = y1 - (X1*x1 - X2*x2) + " << eps << "*(X1*x1)*(X1*x1)\n"
         << "Y2 = y2 - (X1*x2 + X2*x1)\n";
    auto c = parse_chart(text.str());
    Eigen::VectorXd y = solve_y(c, x, X, vec2(0.1, 0.05), vec2(0, 0));
    double m = regularity_margin(c, x, y, X).margin;
    CHECK(m < prev + 1e-9);
    prev = m;
  }
  CHECK(prev < 1.0);
}

TEST_CASE("scan: classical clean, componentwise fully flagged, dual consistent") {
  auto cl = parse_chart(kClassical);
  auto rep = regularity_scan(cl, -0.5, 0.5, 3, 1e-6);
  CHECK(rep.min_margin == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep.flagged.empty());
  CHECK(rep.max_dual_deviation < 1e-4);

  auto cw = parse_chart(kComponentwise);
  auto rep2 = regularity_scan(cw, -0.5, 0.5, 2, 1e-6);
  CHECK((int)rep2.flagged.size() == rep2.flags_visited);
}

TEST_CASE("tableau isotopy covariance under diagonal rescaling") {
  // x -> A x, X -> B X transforms t(u, v) to a t(e^-1 u, c^-1 v) for the
  // induced maps; with diagonal A, B this is checkable directly by scanning
  // the rescaled chart.
  auto base = parse_chart(kClassical);
  double a1 = 2.0, a2 = 0.5, b1 = 3.0, b2 = 1.5;
  std::ostringstream text;
  text << "dim 2\n"
       << "Y1 = y1 - ((" << b1 << "*X1)*(" << a1 << "*x1) - (" << b2 << "*X2)*(" << a2
       << "*x2))\n"
       << "Y2 = y2 - ((" << b1 << "*X1)*(" << a2 << "*x2) + (" << b2 << "*X2)*(" << a1
       << "*x1))\n";
  auto scaled = parse_chart(text.str());
  Eigen::VectorXd x = vec2(0.1, -0.15), X = vec2(0.12, 0.2);
  Eigen::VectorXd y = solve_y(scaled, x, X, vec2(0.05, 0.1), vec2(0, 0));
  auto jet = tableau_at(scaled, x, y, X);
  // compare against isotopy_transform of the base tableau computed at the
  // corresponding base flag
  Eigen::VectorXd xb = vec2(a1 * x(0), a2 * x(1)), Xb = vec2(b1 * X(0), b2 * X(1));
  Eigen::VectorXd yb = solve_y(base, xb, Xb, vec2(0.0, 0.0), vec2(0, 0));
  auto jb = tableau_at(base, xb, yb, Xb);
  Eigen::MatrixXd A = Eigen::Vector2d(a1, a2).asDiagonal();
  Eigen::MatrixXd B = Eigen::Vector2d(b1, b2).asDiagonal();
  Tableau3 expect = isotopy_transform(jb.tableau, A.inverse(), B.inverse(),
                                      Eigen::MatrixXd::Identity(2, 2));
  for (int mu = 0; mu < 2; ++mu)
    for (int nu = 0; nu < 2; ++nu)
      for (int sg = 0; sg < 2; ++sg)
        CHECK(jet.tableau.at(mu, nu, sg) ==
              doctest::Approx(expect.at(mu, nu, sg)).epsilon(1e-4).scale(1.0));
}

TEST_CASE("data files parse and match the inline charts") {
  std::ifstream f("data/classical.chart");
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  auto c = parse_chart(ss.str());
  CHECK(c.n == 2);
}
