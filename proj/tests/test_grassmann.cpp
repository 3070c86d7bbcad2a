#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "planegeo/grassmann.hpp"
#include "planegeo/pencil.hpp"

using namespace planegeo;

namespace {

const char* kClassical =
    "dim 2\n"
    "Y1 = y1 - (X1*x1 - X2*x2)\n"
    "Y2 = y2 - (X1*x2 + X2*x1)\n";

// standard complex structure J(e1)=e2, J(e3)=e4 in coordinates (x1,x2,y1,y2)
Eigen::Vector4d J(const Eigen::Vector4d& v) {
  return Eigen::Vector4d(-v(1), v(0), -v(3), v(2));
}

Eigen::Vector4d e(int i) {
  Eigen::Vector4d v = Eigen::Vector4d::Zero();
  v(i) = 1;
  return v;
}

}  // namespace

TEST_CASE("self-dual split of basis forms") {
  TwoForm4 w;  // e^{12}
  w.c << 1, 0, 0, 0, 0, 0;
  auto s = split_sd(w);
  CHECK(s.X(0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(s.Y(0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(s.X.tail(2).norm() == doctest::Approx(0.0));

  TwoForm4 w34;  // e^{34}
  w34.c << 0, 0, 0, 0, 0, 1;
  auto s34 = split_sd(w34);
  CHECK(s34.X(0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(s34.Y(0) == doctest::Approx(-1 / std::sqrt(2.0)));
}

TEST_CASE("split is an isometry and reconstructs") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 1);
  for (int k = 0; k < 100; ++k) {
    TwoForm4 w;
    double norm2 = 0;
    for (int i = 0; i < 6; ++i) {
      w.c(i) = g(rng);
      norm2 += w.c(i) * w.c(i);
    }
    auto s = split_sd(w);
    CHECK(s.X.squaredNorm() + s.Y.squaredNorm() == doctest::Approx(norm2).epsilon(1e-12));
    TwoForm4 back = from_sd(s.X, s.Y);
    for (int i = 0; i < 6; ++i) CHECK(back.c(i) == doctest::Approx(w.c(i)).epsilon(1e-12));
    // dV pairing (w ^ w)/dV = |X|^2 - |Y|^2
    CHECK(w.wedge(w) == doctest::Approx(s.X.squaredNorm() - s.Y.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("plane_to_spheres on coordinate planes") {
  auto p12 = plane_to_spheres(e(0), e(1));
  CHECK((p12.xplus - Eigen::Vector3d(1, 0, 0)).norm() == doctest::Approx(0.0));
  CHECK((p12.yminus - Eigen::Vector3d(-1, 0, 0)).norm() == doctest::Approx(0.0));

  auto p34 = plane_to_spheres(e(2), e(3));
  CHECK((p34.xplus - Eigen::Vector3d(1, 0, 0)).norm() == doctest::Approx(0.0));
  CHECK((p34.yminus - Eigen::Vector3d(1, 0, 0)).norm() == doctest::Approx(0.0));
}

TEST_CASE("orientation reversal negates both sphere points") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 1);
  for (int k = 0; k < 50; ++k) {
    Eigen::Vector4d v1, v2;
    for (int i = 0; i < 4; ++i) {
      v1(i) = g(rng);
      v2(i) = g(rng);
    }
    Eigen::Matrix<double, 4, 2> pair_m;
    pair_m.col(0) = v1.normalized();
    pair_m.col(1) = v2.normalized();
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd(pair_m);
    if (svd.singularValues()(1) < 1e-2) continue;
    auto a = plane_to_spheres(v1, v2);
    auto b = plane_to_spheres(v2, v1);
    CHECK((a.xplus + b.xplus).norm() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK((a.yminus + b.yminus).norm() == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("complex lines share the sigma+ component") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0, 1);
  Eigen::Vector3d ref = plane_to_spheres(e(0), J(e(0))).xplus;
  for (int k = 0; k < 100; ++k) {
    Eigen::Vector4d v;
    for (int i = 0; i < 4; ++i) v(i) = g(rng);
    if (v.norm() < 1e-3) continue;
    auto p = plane_to_spheres(v, J(v));
    CHECK((p.xplus - ref).norm() == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("pairing sign: complementary planes, self, complex lines") {
  auto a = plane_to_spheres(e(0), e(1));
  auto b = plane_to_spheres(e(2), e(3));
  auto pr = pairing_sign(a, b);
  CHECK(pr.sign == 1);
  CHECK(pr.value == doctest::Approx(2.0));
  CHECK(pairing_sign(a, a).sign == 0);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0, 1);
  for (int k = 0; k < 50; ++k) {
    Eigen::Vector4d v, w;
    for (int i = 0; i < 4; ++i) {
      v(i) = g(rng);
      w(i) = g(rng);
    }
    auto pv = plane_to_spheres(v, J(v));
    auto pw = plane_to_spheres(w, J(w));
    // distinct complex lines meet positively; identical ones give 0
    auto s = pairing_sign(pv, pw);
    CHECK(s.sign >= 0);
    // symmetry
    CHECK(pairing_sign(pw, pv).value == doctest::Approx(s.value).epsilon(1e-12));
  }
}

TEST_CASE("lipschitz estimates: constant, classical pencil, isometric") {
  ContractingField constant;
  for (int k = 0; k < 16; ++k) {
    double th = 2 * M_PI * k / 16;
    constant.samples.push_back(
        {Eigen::Vector3d(std::cos(th), std::sin(th), 0), Eigen::Vector3d(0, 0, 1)});
  }
  CHECK(lipschitz_estimate(constant).L == doctest::Approx(0.0));

  auto c = parse_chart(kClassical);
  Eigen::VectorXd x(2), X(2), Y(2);
  x << 0.1, -0.2;
  X << 0.3, 0.2;
  Y << 0.05, 0.15;
  Eigen::VectorXd y = solve_y(c, x, X, Y, Eigen::VectorXd::Zero(2));
  auto f = encode_pencil(c, x, y, X, 48);
  CHECK(f.graph_valid());
  CHECK(lipschitz_estimate(f).L < 1e-3);

  ContractingField iso;
  Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 2).normalized())
                          .toRotationMatrix();
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0, 1);
  for (int k = 0; k < 40; ++k) {
    Eigen::Vector3d yk(g(rng), g(rng), g(rng));
    yk.normalize();
    iso.samples.push_back({yk, R * yk});
  }
  CHECK(lipschitz_estimate(iso).L == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("encoded classical pencil has all-positive pairwise pairings") {
  auto c = parse_chart(kClassical);
  Eigen::VectorXd x(2), X(2), Y(2);
  x << 0.0, 0.0;
  X << 0.1, -0.3;
  Y << 0.0, 0.0;
  Eigen::VectorXd y = solve_y(c, x, X, Y, Eigen::VectorXd::Zero(2));
  auto f = encode_pencil(c, x, y, X, 32);
  for (size_t i = 0; i < f.samples.size(); ++i)
    for (size_t j = i + 1; j < f.samples.size(); ++j) {
      SpherePair a{f.samples[i].xplus, f.samples[i].yminus};
      SpherePair b{f.samples[j].xplus, f.samples[j].yminus};
      CHECK(pairing_sign(a, b).sign == 1);
    }
}

TEST_CASE("componentwise chart pencil is not a contracting graph") {
  auto c = parse_chart(
      "dim 2\n"
      "Y1 = y1 - X1*x1\n"
      "Y2 = y2 - X2*x2\n");
  Eigen::VectorXd x(2), X(2), Y(2);
  x << 0.1, 0.2;
  X << 0.3, -0.2;
  Y << 0.0, 0.0;
  Eigen::VectorXd y = solve_y(c, x, X, Y, Eigen::VectorXd::Zero(2));
  auto f = encode_pencil(c, x, y, X, 32);
  bool bad_graph = !f.graph_valid();
  double L = 0;
  try {
    L = lipschitz_estimate(f).L;
  } catch (const GrassmannError&) {
    bad_graph = true;
  }
  CHECK((bad_graph || L >= 1.0 - 1e-6));
}

TEST_CASE("line_through_vector on the constant complex field") {
  // constant field of the standard complex structure: sample many planes
  ContractingField f;
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0, 1);
  while (f.samples.size() < 64) {
    Eigen::Vector4d v;
    for (int i = 0; i < 4; ++i) v(i) = g(rng);
    if (v.norm() < 1e-3) continue;
    auto p = plane_to_spheres(v, J(v));
    f.samples.push_back({p.yminus, p.xplus});
  }
  REQUIRE(lipschitz_estimate(f).L < 1e-9);

  double res = 0;
  auto p1 = line_through_vector(f, e(0), &res);
  auto expect1 = plane_to_spheres(e(0), e(1));
  CHECK((p1.yminus - expect1.yminus).norm() < 1e-6);
  CHECK(res < 1e-8);

  auto p3 = line_through_vector(f, e(2), &res);
  auto expect3 = plane_to_spheres(e(2), e(3));
  CHECK((p3.yminus - expect3.yminus).norm() < 1e-6);

  // scale invariance
  auto p7 = line_through_vector(f, Eigen::Vector4d(7 * e(0)), &res);
  CHECK((p7.yminus - p1.yminus).norm() < 1e-7);

  // idempotence: rebuild a vector in the returned plane and resolve
  TwoForm4 w = spheres_to_form(SpherePair{p1.xplus, p1.yminus});
  auto again = line_through_vector(f, e(0) + 0.5 * J(e(0)), &res);
  CHECK((again.yminus - p1.yminus).norm() < 1e-7);
  (void)w;
}

TEST_CASE("field file roundtrip and validation") {
  ContractingField f;
  for (int k = 0; k < 8; ++k) {
    double th = 2 * M_PI * k / 8;
    f.samples.push_back(
        {Eigen::Vector3d(std::cos(th), std::sin(th), 0), Eigen::Vector3d(0, 0, 1)});
  }
  std::ostringstream os;
  write_field(os, f);
  std::istringstream is(os.str());
  auto r = read_field(is);
  REQUIRE(r.samples.size() == 8);
  for (int k = 0; k < 8; ++k) {
    CHECK((r.samples[k].yminus - f.samples[k].yminus).norm() < 1e-12);
    CHECK((r.samples[k].xplus - f.samples[k].xplus).norm() < 1e-12);
  }

  std::istringstream bad("0 0 2 0 0 1\n");  // non-unit y
  CHECK_THROWS_AS(read_field(bad), GrassmannError);
}

TEST_CASE("too few samples") {
  ContractingField f;
  CHECK_THROWS_AS(lipschitz_estimate(f), TooFewSamples);
}
