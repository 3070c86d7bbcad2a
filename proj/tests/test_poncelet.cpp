#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "planegeo/poncelet.hpp"

using namespace planegeo;

namespace {

RConic unit_circle() { return RConic::circle(0, 0, 1); }

RConic load_conic(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  return read_conic<double>(f);
}

RPoint on_circle(double th) { return RPoint::of(std::cos(th), std::sin(th), 1.0); }

}  // namespace

TEST_CASE("conic through five points recovers the unit circle") {
  std::array<Hom<double>, 5> pts;
  for (int k = 0; k < 5; ++k) pts[k] = on_circle(0.3 + 2 * M_PI * k / 5);
  auto C = conic_through_5(pts);
  auto U = unit_circle();
  CHECK(C.same(U, 1e-9));
  for (auto& p : pts) CHECK(std::abs(C.value(p)) < 1e-12);
}

TEST_CASE("five points with a colinear triple are rejected") {
  std::array<Hom<double>, 5> pts = {
      Hom<double>::of(0, 0, 1), Hom<double>::of(1, 0, 1), Hom<double>::of(2, 0, 1),
      Hom<double>::of(0, 1, 1), Hom<double>::of(1, 2, 1)};
  CHECK_THROWS_AS(conic_through_5(pts), ColinearTriple);
}

TEST_CASE("tangent line is incident and unique at a conic point") {
  auto U = unit_circle();
  for (double th : {0.1, 1.7, 3.0, 5.2}) {
    auto p = on_circle(th);
    auto l = tangent_line(U, p);
    CHECK(incident(p, l, 1e-10));
    // the tangent meets the conic only at p
    auto pts = line_conic_intersect(U, l);
    for (auto& q : pts) CHECK(q.same(p, 1e-6));
  }
}

TEST_CASE("tangents from an external point, and InsideConic inside") {
  auto U = unit_circle();
  auto out = Hom<double>::of(2, 0, 1);
  auto tl = tangents_from(U, out);
  REQUIRE(tl.size() == 2);
  for (auto& l : tl) {
    CHECK(incident(out, l, 1e-9));
    // tangency oracle for the unit circle: distance of l from the origin is 1
    Eigen::Vector3d v = l.normalized().v;
    CHECK(std::abs(v(2)) / std::hypot(v(0), v(1)) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(tangents_from(U, Hom<double>::of(0.2, 0.1, 1)), InsideConic);
}

TEST_CASE("both involutions square to the identity") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_ellipse.conic");
  auto dist_pt = [](const RPoint& a, const RPoint& b) {
    Eigen::Vector3d u = a.normalized().v, v = b.normalized().v;
    u /= u.norm();
    v /= v.norm();
    return std::min((u - v).norm(), (u + v).norm());
  };
  auto dist_ln = [&](const RLine& a, const RLine& b) {
    return dist_pt(RPoint{a.v}, RPoint{b.v});
  };
  for (double th : {0.0, 0.9, 2.1, 3.8, 5.5}) {
    auto s = initial_state(outer, inner, on_circle(th));
    auto sp = iota_P(outer, inner, iota_P(outer, inner, s));
    CHECK(dist_pt(sp.point, s.point) < 1e-8);
    CHECK(dist_ln(sp.line, s.line) < 1e-8);
    auto sl = iota_L(outer, inner, iota_L(outer, inner, s));
    CHECK(dist_pt(sl.point, s.point) < 1e-8);
    CHECK(dist_ln(sl.line, s.line) < 1e-8);
  }
}

TEST_CASE("the Poncelet map and its square are fixed-point-free on a generic pair") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_ellipse.conic");
  auto dist_pt = [](const RPoint& a, const RPoint& b) {
    Eigen::Vector3d u = a.normalized().v, v = b.normalized().v;
    u /= u.norm();
    v /= v.norm();
    return std::min((u - v).norm(), (u + v).norm());
  };
  double min1 = 1e9, min2 = 1e9;
  for (int k = 0; k < 40; ++k) {
    auto s = initial_state(outer, inner, on_circle(2 * M_PI * k / 40.0));
    auto s1 = poncelet_step(outer, inner, s);
    auto s2 = poncelet_step(outer, inner, s1);
    min1 = std::min(min1, dist_pt(s1.point, s.point));
    min2 = std::min(min2, dist_pt(s2.point, s.point));
  }
  CHECK(min1 > 1e-4);
  CHECK(min2 > 1e-4);
}

TEST_CASE("concentric circle with half radius closes with period 3") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_half.conic");
  auto s = initial_state(outer, inner, on_circle(0.4));
  auto cr = closure_detect(outer, inner, s);
  CHECK(cr.closed);
  CHECK(cr.period == 3);
  CHECK(cr.residual < 1e-7);
}

TEST_CASE("concentric circle with radius sqrt(2)/2 closes with period 4") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_sqrt2.conic");
  auto s = initial_state(outer, inner, on_circle(1.1));
  auto cr = closure_detect(outer, inner, s);
  CHECK(cr.closed);
  CHECK(cr.period == 4);
}

TEST_CASE("generic nested ellipse pair does not close within 64 steps") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_ellipse.conic");
  auto s = initial_state(outer, inner, on_circle(0.7));
  auto cr = closure_detect(outer, inner, s);
  CHECK(!cr.closed);
}

TEST_CASE("rotation number of the period-3 pair is 1/3") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_half.conic");
  auto s = initial_state(outer, inner, on_circle(0.4));
  auto r = rotation_number(outer, inner, s);
  CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-3);
  // independent of the starting vertex
  auto r2 = rotation_number(outer, inner, initial_state(outer, inner, on_circle(2.9)));
  CHECK(std::abs(r2.value - r.value) < 1e-6);
}

TEST_CASE("orbit does not drift off the conic pair") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_ellipse.conic");
  auto s = initial_state(outer, inner, on_circle(0.2));
  auto o = orbit(outer, inner, s, 200);
  CHECK(o.states.size() == 201);
  CHECK(o.max_drift < 1e-6);
  for (auto& st : o.states) CHECK(st.valid(outer, inner, 1e-6));
}

TEST_CASE("common tangents: nested pair has four non-real, disjoint circles four real") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_ellipse.conic");
  auto ct = common_tangents(outer, inner);
  REQUIRE(ct.lines.size() == 4);
  for (bool rf : ct.real_flag) CHECK(!rf);

  auto c1 = RConic::circle(0, 0, 1);
  auto c2 = RConic::circle(5, 0, 1);
  auto ct2 = common_tangents(c1, c2);
  REQUIRE(ct2.lines.size() == 4);
  int real_count = 0;
  for (bool rf : ct2.real_flag) real_count += rf ? 1 : 0;
  CHECK(real_count == 4);
}

TEST_CASE("intersecting conics are rejected as not nested") {
  auto outer = unit_circle();
  auto crossing = RConic::circle(0.8, 0, 0.5);  // crosses the unit circle
  CHECK_THROWS_AS(require_nested(outer, crossing), NotNested);
  CHECK_THROWS(initial_state(outer, crossing, on_circle(0.0)));
}

TEST_CASE("poncelet_step rejects a non-incident state") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_half.conic");
  PonceletState bad;
  bad.point = RPoint::of(3, 3, 1);  // not on the outer conic
  bad.line = RLine::of(1, 1, 1);
  CHECK_THROWS_AS(poncelet_step(outer, inner, bad), NotTangentPair);
}

TEST_CASE("ellipse parametrization round-trips the angle") {
  auto inner = load_conic("data/inner_ellipse.conic");
  EllipseParam par(inner);
  for (double th : {0.0, 0.5, 1.6, 3.1, 4.4, 6.0}) {
    auto p = par.point(th);
    CHECK(std::abs(inner.value(p)) < 1e-9);
    double back = par.theta(p);
    double diff = std::remainder(back - th, 2 * M_PI);
    CHECK(std::abs(diff) < 1e-9);
  }
}

TEST_CASE("conic file round trip") {
  auto inner = load_conic("data/inner_ellipse.conic");
  std::ostringstream os;
  write_conic(os, inner);
  std::istringstream is(os.str());
  auto back = read_conic<double>(is);
  CHECK(back.same(inner, 1e-12));
}

TEST_CASE("orbit CSV has the documented header and row count") {
  auto outer = unit_circle();
  auto inner = load_conic("data/inner_half.conic");
  auto s = initial_state(outer, inner, on_circle(0.4));
  auto o = orbit(outer, inner, s, 6);
  std::ostringstream os;
  write_orbit_csv(os, outer, o);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "step,theta,px,py,l0,l1,l2");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 7);
}
