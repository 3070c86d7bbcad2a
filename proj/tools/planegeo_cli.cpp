// Batch front end: parse options, dispatch library operations, emit
// deterministic reports and optional SVG plots.
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure,
// 64 usage error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "planegeo/chart_geometry.hpp"
#include "planegeo/conic.hpp"
#include "planegeo/grassmann.hpp"
#include "planegeo/pencil.hpp"
#include "planegeo/poncelet.hpp"
#include "planegeo/projective.hpp"
#include "planegeo/radon.hpp"
#include "planegeo/report.hpp"
#include "planegeo/svg.hpp"
#include "planegeo/tableau.hpp"
#include "planegeo/triality.hpp"

using namespace planegeo;

namespace {

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationFailure("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationFailure("cannot open file: " + path);
  return f;
}

Eigen::VectorXd parse_vec(const std::string& s) {
  Eigen::VectorXd v;
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  v.resize((int)vals.size());
  for (int i = 0; i < (int)vals.size(); ++i) v(i) = vals[i];
  return v;
}

// The componentwise product on R^2: the standard non-triality example.
Tableau3 componentwise_tableau() {
  Tableau3 t(2, 2, 2);
  t.at(0, 0, 0) = 1;
  t.at(1, 1, 1) = 1;
  return t;
}

Tableau3 load_tableau(const std::string& kind, const std::string& file) {
  if (!file.empty()) {
    auto f = open_in(file);
    return read_tableau(f);
  }
  if (kind == "R") return classical_tableau(AlgebraKind::R);
  if (kind == "C") return classical_tableau(AlgebraKind::C);
  if (kind == "H") return classical_tableau(AlgebraKind::H);
  if (kind == "O") return classical_tableau(AlgebraKind::O);
  if (kind == "componentwise") return componentwise_tableau();
  throw ValidationFailure("unknown tableau kind: " + kind);
}

void write_out(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw ValidationFailure("cannot write file: " + out);
    f << text;
  }
}

struct Options {
  std::string kind, file, out, svg, surface = "line", field, vec, points;
  std::string qe, qv, xs = "0,0", ys, Xs = "0,0", px = "0,0", py = "0,0";
  uint64_t seed = 1;
  double tol = 1e-9, h = 1e-3, start = 0.0;
  long n = 100000;
  int grid = 3, samples = 64, steps = 64;
};

int dispatch(CLI::App& app, Options& o);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planegeo: computational geometry of smooth projective planes"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Options o;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--seed", o.seed, "RNG seed");
    s->add_option("--tol", o.tol, "tolerance");
    s->add_option("--out", o.out, "write report to file instead of stdout");
    s->add_option("--svg", o.svg, "write an SVG plot");
  };

  auto* tri = app.add_subcommand("triality", "tableau and triality-algebra operations");
  tri->require_subcommand(1);
  for (const char* name : {"check", "classify", "integral-elements", "algebra"}) {
    auto* s = tri->add_subcommand(name);
    s->add_option("--kind", o.kind, "built-in tableau: R, C, H, O, componentwise");
    s->add_option("--file", o.file, "tableau file");
    add_common(s);
  }

  auto* ch = app.add_subcommand("chart", "chart DSL differential geometry");
  ch->require_subcommand(1);
  for (const char* name : {"tableau", "margin", "scan"}) {
    auto* s = ch->add_subcommand(name);
    s->add_option("--file", o.file, "chart DSL file")->required();
    s->add_option("--x", o.xs, "comma-separated point coordinates");
    s->add_option("--X", o.Xs, "comma-separated line coordinates");
    s->add_option("--grid", o.grid, "scan grid points per axis");
    add_common(s);
  }

  auto* gw = app.add_subcommand("gw", "Gluck-Warner sphere-pair encoding");
  gw->require_subcommand(1);
  {
    auto* s = gw->add_subcommand("encode");
    s->add_option("--file", o.file, "chart DSL file")->required();
    s->add_option("--x", o.xs, "chart point");
    s->add_option("--X", o.Xs, "base line coordinates");
    s->add_option("--samples", o.samples, "pencil sample count");
    add_common(s);
    auto* s2 = gw->add_subcommand("lipschitz");
    s2->add_option("--field", o.field, "field file")->required();
    add_common(s2);
    auto* s3 = gw->add_subcommand("solve-line");
    s3->add_option("--field", o.field, "field file")->required();
    s3->add_option("--vector", o.vec, "tangent 4-vector v1,v2,v3,v4")->required();
    add_common(s3);
  }

  auto* ra = app.add_subcommand("radon", "Radon transform and Crofton counting");
  ra->require_subcommand(1);
  {
    auto* s = ra->add_subcommand("pointwise");
    s->add_option("--px", o.px, "chart point x as re,im");
    s->add_option("--py", o.py, "chart point y as re,im");
    add_common(s);
    auto* s2 = ra->add_subcommand("crofton");
    s2->add_option("--surface", o.surface, "line | conic | patch");
    s2->add_option("--conic", o.qe, "conic file for --surface conic");
    s2->add_option("--patch", o.file, "patch file for --surface patch");
    s2->add_option("--n", o.n, "sample count");
    add_common(s2);
    auto* s3 = ra->add_subcommand("closedness");
    s3->add_option("--grid", o.grid, "grid points per axis");
    s3->add_option("--step", o.h, "difference step");
    add_common(s3);
  }

  auto* po = app.add_subcommand("poncelet", "conic dynamics");
  po->require_subcommand(1);
  {
    for (const char* name : {"orbit", "closure", "rotation", "tangents"}) {
      auto* s = po->add_subcommand(name);
      s->add_option("--qe", o.qe, "inner (tangency) conic file")->required();
      s->add_option("--qv", o.qv, "outer (vertex) conic file");
      s->add_option("--n", o.n, "orbit length / step count");
      s->add_option("--start", o.start, "initial angle on the outer conic");
      add_common(s);
    }
    auto* s5 = po->add_subcommand("conic5");
    s5->add_option("--points", o.points, "file with 5 rows `x y`")->required();
    add_common(s5);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    return dispatch(app, o);
  } catch (const ValidationFailure& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const SyntaxError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NotNested& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NotTangentPair& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const TableauError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ConicError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NegativeDensity& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const UnplottableResult& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}

namespace {

int cmd_triality(const std::string& sub, Options& o) {
  Tableau3 t = load_tableau(o.kind, o.file);
  Report rep("triality " + sub);
  rep.add("seed", (unsigned long long)o.seed);
  rep.add("tol", o.tol);
  if (sub == "check") {
    auto v = is_triality(t, o.tol);
    rep.add("verdict", std::string(v.verdict ? "triality" : "not a triality"));
    rep.add("margin", v.margin);
    if (v.witness) {
      std::vector<double> w(v.witness->data(), v.witness->data() + v.witness->size());
      rep.add_vector("witness", w);
    }
  } else if (sub == "integral-elements") {
    auto ie = integral_elements(t);
    rep.add("dimension", ie.dimension);
    rep.add("residual", ie.residual);
  } else {
    int n = t.dimU();
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
    e0(0) = 1;
    auto alg = triality_algebra(t, e0, e0);
    if (sub == "classify") {
      bool cls = is_classical(alg, o.tol > 0 ? o.tol : 1e-8);
      rep.add("classical", cls);
    } else {  // algebra
      rep.add("dimension", n);
      Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, (double)n);
      rep.add("real_part_sample", real_part(alg, v));
      rep.add("identity_error",
              (alg.product(alg.identity, v) - v).norm() / std::max(1.0, v.norm()));
    }
  }
  write_out(o.out, rep.str());
  return 0;
}

int cmd_chart(const std::string& sub, Options& o) {
  ChartExpr c = parse_chart(slurp(o.file));
  Report rep("chart " + sub);
  rep.add("seed", (unsigned long long)o.seed);
  rep.add("tol", o.tol);
  if (sub == "scan") {
    auto sr = regularity_scan(c, -0.5, 0.5, o.grid, o.tol);
    rep.add("flags_visited", sr.flags_visited);
    rep.add("min_margin", sr.min_margin);
    rep.add("irregular_flags", (long)sr.flagged.size());
    rep.add("max_dual_deviation", sr.max_dual_deviation);
    if (!o.svg.empty()) {
      // margin heatmap over the first two x-coordinates at the scan box
      SvgCanvas canvas;
      int m = std::max(o.grid, 2);
      std::vector<std::vector<double>> vals(m, std::vector<double>(m));
      Eigen::VectorXd x0 = parse_vec(o.xs), X0 = parse_vec(o.Xs);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          Eigen::VectorXd x = x0;
          x(0) = -0.5 + (double)i / (m - 1);
          x(1) = -0.5 + (double)j / (m - 1);
          vals[i][j] = regularity_margin(c, x, solve_y(c, x, X0, Eigen::VectorXd::Zero(c.n), Eigen::VectorXd::Zero(c.n)), X0).margin;
        }
      canvas.add_heatmap(vals, -0.5, -0.5, 0.5, 0.5);
      write_out(o.svg, canvas.str());
    }
  } else {
    Eigen::VectorXd x = parse_vec(o.xs), X = parse_vec(o.Xs);
    if (x.size() != c.n || X.size() != c.n)
      throw ValidationFailure("--x/--X must have dim entries");
    Eigen::VectorXd y = solve_y(c, x, X, Eigen::VectorXd::Zero(c.n), Eigen::VectorXd::Zero(c.n));
    if (sub == "tableau") {
      auto jet = tableau_at(c, x, y, X);
      for (int mu = 0; mu < c.n; ++mu)
        for (int nu = 0; nu < c.n; ++nu)
          for (int sg = 0; sg < c.n; ++sg)
            rep.add("t[" + std::to_string(mu) + "][" + std::to_string(nu) + "][" +
                        std::to_string(sg) + "]",
                    jet.tableau.at(mu, nu, sg));
    } else {  // margin
      auto m = regularity_margin(c, x, y, X);
      rep.add("margin", m.margin);
      rep.add("embedded_gauss", m.embedded_gauss);
    }
  }
  write_out(o.out, rep.str());
  return 0;
}

int cmd_gw(const std::string& sub, Options& o) {
  Report rep("gw " + sub);
  rep.add("seed", (unsigned long long)o.seed);
  rep.add("tol", o.tol);
  if (sub == "encode") {
    ChartExpr c = parse_chart(slurp(o.file));
    Eigen::VectorXd x = parse_vec(o.xs), X = parse_vec(o.Xs);
    Eigen::VectorXd y = solve_y(c, x, X, Eigen::VectorXd::Zero(c.n), Eigen::VectorXd::Zero(c.n));
    auto f = encode_pencil(c, x, y, X, o.samples);
    rep.add("samples", (long)f.samples.size());
    rep.add("graph_valid", f.graph_valid());
    rep.add("lipschitz", lipschitz_estimate(f).L);
    if (!o.out.empty()) {
      std::ofstream of(o.out);
      write_field(of, f);
      std::cout << rep.str();
      return 0;
    }
  } else {
    auto fi = open_in(o.field);
    auto f = read_field(fi);
    if (sub == "lipschitz") {
      auto l = lipschitz_estimate(f);
      rep.add("lipschitz", l.L);
      rep.add("samples", (long)f.samples.size());
      rep.add("contracting", l.L < 1.0);
    } else {  // solve-line
      Eigen::VectorXd v = parse_vec(o.vec);
      if (v.size() != 4) throw ValidationFailure("--vector needs 4 components");
      double residual = 0;
      auto p = line_through_vector(f, Eigen::Vector4d(v), &residual);
      rep.add_vector("xplus", {p.xplus(0), p.xplus(1), p.xplus(2)});
      rep.add_vector("yminus", {p.yminus(0), p.yminus(1), p.yminus(2)});
      rep.add("residual", residual);
    }
  }
  write_out(o.out, rep.str());
  return 0;
}

int cmd_radon(const std::string& sub, Options& o) {
  LineDensity fs;
  Report rep("radon " + sub);
  rep.add("seed", (unsigned long long)o.seed);
  rep.add("tol", o.tol);
  if (sub == "pointwise") {
    Eigen::VectorXd px = parse_vec(o.px), py = parse_vec(o.py);
    if (px.size() != 2 || py.size() != 2)
      throw ValidationFailure("--px/--py need re,im pairs");
    auto M = pointwise_radon(fs, {px(0), px(1)}, {py(0), py(1)});
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        rep.add("R[" + std::to_string(i) + "][" + std::to_string(j) + "]", M(i, j));
    rep.add("wedge_square", wedge_square(M));
  } else if (sub == "crofton") {
    TestSurface S;
    if (o.surface == "line") {
      S = Hom<cplx>::of({1, 0}, {2, 0.5}, {-0.3, 0});
    } else if (o.surface == "conic") {
      if (o.qe.empty()) throw ValidationFailure("--surface conic needs --conic FILE");
      auto f = open_in(o.qe);
      auto q = read_conic<double>(f);
      Conic<cplx> qc;
      qc.Q = q.Q.cast<cplx>();
      S = qc;
    } else if (o.surface == "patch") {
      if (o.file.empty()) throw ValidationFailure("--surface patch needs --patch FILE");
      auto f = open_in(o.file);
      S = read_patch(f);
    } else {
      throw ValidationFailure("unknown surface: " + o.surface);
    }
    auto res = crofton_mc(fs, S, o.n, o.seed);
    rep.add("samples", res.samples);
    rep.add("estimate", res.estimate);
    rep.add("stderr", res.stderr_);
    rep.add("rejected_vertical", res.rejected_vertical);
    rep.add("dead_band", res.dead_band);
  } else {  // closedness
    std::vector<Eigen::Vector4d> pts;
    int g = std::max(2, o.grid);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j)
        for (int k = 0; k < g; ++k)
          for (int l = 0; l < g; ++l)
            pts.push_back({-0.3 + 0.6 * i / (g - 1), -0.3 + 0.6 * j / (g - 1),
                           -0.3 + 0.6 * k / (g - 1), -0.3 + 0.6 * l / (g - 1)});
    auto r = closedness_check(fs, pts, o.h);
    rep.add("grid", o.grid);
    rep.add("h", o.h);
    rep.add("max_residual", r.max_residual);
  }
  write_out(o.out, rep.str());
  return 0;
}

int cmd_poncelet(const std::string& sub, Options& o) {
  Report rep("poncelet " + sub);
  rep.add("seed", (unsigned long long)o.seed);
  rep.add("tol", o.tol);
  if (sub == "conic5") {
    auto f = open_in(o.points);
    std::array<Hom<double>, 5> pts;
    for (int k = 0; k < 5; ++k) {
      double x, y;
      if (!(f >> x >> y)) throw ValidationFailure("points file needs 5 rows `x y`");
      pts[k] = Hom<double>::of(x, y, 1);
    }
    auto c = conic_through_5(pts);
    std::ostringstream ss;
    write_conic(ss, c);
    rep.add("conic", ss.str().substr(0, ss.str().size() - 1));
    double res = 0;
    for (auto& p : pts) res = std::max(res, std::abs(c.value(p.normalized())));
    rep.add("max_point_residual", res);
    write_out(o.out, rep.str());
    return 0;
  }
  auto fe = open_in(o.qe);
  RConic inner = read_conic<double>(fe);
  RConic outer = RConic::circle(0, 0, 1);
  if (!o.qv.empty()) {
    auto fv = open_in(o.qv);
    outer = read_conic<double>(fv);
  }
  if (sub == "tangents") {
    auto ct = common_tangents(outer, inner);
    int nreal = 0;
    for (bool b : ct.real_flag) nreal += b;
    rep.add("count", (long)ct.lines.size());
    rep.add("real_count", nreal);
    for (size_t i = 0; i < ct.lines.size(); ++i) {
      auto l = ct.lines[i].normalized().v;
      std::vector<double> row;
      for (int k = 0; k < 3; ++k) {
        row.push_back(l(k).real());
        row.push_back(l(k).imag());
      }
      rep.add_vector("line" + std::to_string(i), row);
    }
    write_out(o.out, rep.str());
    return 0;
  }
  require_nested(outer, inner);
  EllipseParam par(outer);
  auto s0 = initial_state(outer, inner, par.point(o.start));
  if (sub == "orbit") {
    auto orb = orbit(outer, inner, s0, (int)o.n);
    rep.add("steps", o.n);
    rep.add("max_drift", orb.max_drift);
    std::ostringstream csv;
    write_orbit_csv(csv, outer, orb);
    write_out(o.out, rep.str() + csv.str());
    if (!o.svg.empty()) {
      SvgCanvas canvas;
      canvas.add_conic(outer, "#2255aa", 0.01);
      canvas.add_conic(inner, "#aa3322", 0.01);
      std::vector<std::pair<double, double>> poly;
      double tang = 0;
      for (auto& st : orb.states) {
        auto p = st.point.normalized().v;
        poly.push_back({p(0) / p(2), p(1) / p(2)});
        tang = std::max(tang, st.line_residual(inner));
      }
      canvas.add_polyline(poly, "#228833", 0.008);
      canvas.add_annotation(poly[0].first, poly[0].second,
                            "tangency residual " + format_double(tang));
      write_out(o.svg, canvas.str());
    }
    return 0;
  }
  if (sub == "closure") {
    auto cl = closure_detect(outer, inner, s0, (int)std::max<long>(o.n, 8));
    rep.add("closed", cl.closed);
    rep.add("period", cl.period);
    rep.add("residual", cl.residual);
  } else if (sub == "rotation") {
    auto rn = rotation_number(outer, inner, s0, (int)std::max<long>(o.n, 8));
    rep.add("rotation_number", rn.value);
    rep.add("steps", (long)rn.steps);
  } else {
    throw ValidationFailure("unknown poncelet subcommand");
  }
  write_out(o.out, rep.str());
  return 0;
}

int dispatch(CLI::App& app, Options& o) {
  for (auto* grp : app.get_subcommands()) {
    std::string g = grp->get_name();
    auto subs = grp->get_subcommands();
    if (subs.empty()) throw ValidationFailure("missing sub-operation for " + g);
    std::string sub = subs[0]->get_name();
    if (g == "triality") return cmd_triality(sub, o);
    if (g == "chart") return cmd_chart(sub, o);
    if (g == "gw") return cmd_gw(sub, o);
    if (g == "radon") return cmd_radon(sub, o);
    if (g == "poncelet") return cmd_poncelet(sub, o);
  }
  return 64;
}

}  // namespace
