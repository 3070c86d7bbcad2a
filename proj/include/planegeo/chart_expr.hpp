#pragma once

// Small expression DSL for charts Y_i = Y_i(x, y, X), with forward-mode
// automatic differentiation carrying value, gradient and Hessian.
//
// Grammar:
//   chart  := "dim" INT NEWLINE def+
//   def    := "Y" INT "=" expr
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := NUMBER | VAR | "(" expr ")" | ("sin"|"cos"|"exp") "(" expr ")"
//   VAR    := ("x"|"y"|"X") INT          (1-based index)

#include <cctype>
#include <cmath>
#include <cstring>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace planegeo {

struct ChartError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SyntaxError : ChartError {
  int line, column;
  SyntaxError(const std::string& msg, int l, int c)
      : ChartError(msg + " at line " + std::to_string(l) + ", column " + std::to_string(c)),
        line(l), column(c) {}
};
struct IndexOutOfRange : ChartError {
  using ChartError::ChartError;
};
struct DomainError : ChartError {
  using ChartError::ChartError;
};

// Truncated second-order Taylor value: scalar, gradient, Hessian.
struct Jet {
  double v = 0;
  Eigen::VectorXd g;     // size m
  Eigen::MatrixXd h;     // m x m, symmetric

  static Jet constant(double c, int m) {
    return {c, Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, m)};
  }
  static Jet variable(double c, int m, int slot) {
    Jet j = constant(c, m);
    j.g(slot) = 1.0;
    return j;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.g + b.g, a.h + b.h}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.g - b.g, a.h - b.h}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.g, -a.h}; }

inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.v * b.g + b.v * a.g,
          a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose()};
}

inline Jet operator/(const Jet& a, const Jet& b) {
  if (std::abs(b.v) < 1e-14) throw DomainError("division by near-zero denominator");
  double iv = 1.0 / b.v;
  Jet inv{iv, -iv * iv * b.g,
          -iv * iv * b.h + 2.0 * iv * iv * iv * b.g * b.g.transpose()};
  return a * inv;
}

inline Jet compose(const Jet& a, double f, double fp, double fpp) {
  return {f, fp * a.g, fp * a.h + fpp * a.g * a.g.transpose()};
}
inline Jet sin(const Jet& a) { return compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a) {
  double e = std::exp(a.v);
  return compose(a, e, e, e);
}

// --- AST ---------------------------------------------------------------------

enum class VarGroup { x, y, X };

struct Expr {
  enum class Kind { Number, Var, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp } kind;
  double number = 0;
  VarGroup group = VarGroup::x;
  int index = 0;  // 0-based
  std::unique_ptr<Expr> lhs, rhs;

  // slot layout: x_0..x_{n-1}, y_0.., X_0..
  Jet eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& X) const {
    int n = static_cast<int>(x.size());
    int m = 3 * n;
    switch (kind) {
      case Kind::Number: return Jet::constant(number, m);
      case Kind::Var: {
        int slot = index + n * static_cast<int>(group);
        double val = group == VarGroup::x ? x(index) : group == VarGroup::y ? y(index) : X(index);
        return Jet::variable(val, m, slot);
      }
      case Kind::Add: return lhs->eval(x, y, X) + rhs->eval(x, y, X);
      case Kind::Sub: return lhs->eval(x, y, X) - rhs->eval(x, y, X);
      case Kind::Mul: return lhs->eval(x, y, X) * rhs->eval(x, y, X);
      case Kind::Div: return lhs->eval(x, y, X) / rhs->eval(x, y, X);
      case Kind::Neg: return -lhs->eval(x, y, X);
      case Kind::Sin: return sin(lhs->eval(x, y, X));
      case Kind::Cos: return cos(lhs->eval(x, y, X));
      case Kind::Exp: return exp(lhs->eval(x, y, X));
    }
    throw ChartError("unreachable");
  }

  void print(std::ostream& os) const {
    switch (kind) {
      case Kind::Number: os << number; break;
      case Kind::Var:
        os << (group == VarGroup::x ? 'x' : group == VarGroup::y ? 'y' : 'X') << (index + 1);
        break;
      case Kind::Add: os << '('; lhs->print(os); os << " + "; rhs->print(os); os << ')'; break;
      case Kind::Sub: os << '('; lhs->print(os); os << " - "; rhs->print(os); os << ')'; break;
      case Kind::Mul: os << '('; lhs->print(os); os << " * "; rhs->print(os); os << ')'; break;
      case Kind::Div: os << '('; lhs->print(os); os << " / "; rhs->print(os); os << ')'; break;
      case Kind::Neg: os << "(-"; lhs->print(os); os << ')'; break;
      case Kind::Sin: os << "sin("; lhs->print(os); os << ')'; break;
      case Kind::Cos: os << "cos("; lhs->print(os); os << ')'; break;
      case Kind::Exp: os << "exp("; lhs->print(os); os << ')'; break;
    }
  }
};

using ExprPtr = std::unique_ptr<Expr>;

struct ChartExpr {
  int n = 0;                      // plane half-dimension (1 or 2)
  std::vector<ExprPtr> defs;      // defs[i] is the expression for Y_{i+1}

  // values of all Y_i with first and second partials in (x, y, X)
  std::vector<Jet> eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& X) const {
    std::vector<Jet> out;
    out.reserve(defs.size());
    for (auto& d : defs) out.push_back(d->eval(x, y, X));
    return out;
  }

  std::string pretty() const {
    std::ostringstream os;
    os << "dim " << n << '\n';
    for (size_t i = 0; i < defs.size(); ++i) {
      os << 'Y' << (i + 1) << " = ";
      defs[i]->print(os);
      os << '\n';
    }
    return os.str();
  }
};

namespace detail {

class ChartParser {
public:
  ChartParser(const std::string& text, int n) : src_(text), n_(n) {}

  ExprPtr parse_expression() {
    auto e = parse_expr();
    skip_spaces();
    if (pos_ < src_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  ExprPtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      skip_spaces();
      if (accept('+')) {
        auto e = node(Expr::Kind::Add);
        e->lhs = std::move(lhs);
        e->rhs = parse_term();
        lhs = std::move(e);
      } else if (accept('-')) {
        auto e = node(Expr::Kind::Sub);
        e->lhs = std::move(lhs);
        e->rhs = parse_term();
        lhs = std::move(e);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    auto lhs = parse_factor();
    for (;;) {
      skip_spaces();
      if (accept('*')) {
        auto e = node(Expr::Kind::Mul);
        e->lhs = std::move(lhs);
        e->rhs = parse_factor();
        lhs = std::move(e);
      } else if (accept('/')) {
        auto e = node(Expr::Kind::Div);
        e->lhs = std::move(lhs);
        e->rhs = parse_factor();
        lhs = std::move(e);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_factor() {
    skip_spaces();
    if (accept('-')) {
      auto e = node(Expr::Kind::Neg);
      e->lhs = parse_factor();
      return e;
    }
    if (accept('(')) {
      auto e = parse_expr();
      expect(')');
      return e;
    }
    if (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      return parse_number();
    for (const char* fn : {"sin", "cos", "exp"})
      if (match_word(fn)) {
        auto e = node(fn[0] == 's' ? Expr::Kind::Sin : fn[0] == 'c' ? Expr::Kind::Cos
                                                                    : Expr::Kind::Exp);
        expect('(');
        e->lhs = parse_expr();
        expect(')');
        return e;
      }
    if (pos_ < src_.size() && (src_[pos_] == 'x' || src_[pos_] == 'y' || src_[pos_] == 'X'))
      return parse_var();
    fail("expected number, variable, function or '('");
    return nullptr;
  }

  ExprPtr parse_number() {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
            src_[pos_] == 'e' || src_[pos_] == 'E' ||
            ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
             (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))))
      ++pos_;
    auto e = node(Expr::Kind::Number);
    e->number = std::stod(src_.substr(start, pos_ - start));
    return e;
  }

  ExprPtr parse_var() {
    char c = src_[pos_++];
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == start) fail("variable needs an index");
    int idx = std::stoi(src_.substr(start, pos_ - start));
    if (idx < 1 || idx > n_)
      throw IndexOutOfRange("variable index " + std::to_string(idx) + " out of range for dim " +
                            std::to_string(n_));
    auto e = node(Expr::Kind::Var);
    e->group = c == 'x' ? VarGroup::x : c == 'y' ? VarGroup::y : VarGroup::X;
    e->index = idx - 1;
    return e;
  }

  bool match_word(const char* w) {
    size_t len = std::strlen(w);
    if (src_.compare(pos_, len, w) == 0) {
      pos_ += len;
      return true;
    }
    return false;
  }

  static ExprPtr node(Expr::Kind k) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    return e;
  }

  void skip_spaces() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
  }
  bool accept(char c) {
    skip_spaces();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, line_, static_cast<int>(pos_) + 1);
  }

  std::string src_;
  size_t pos_ = 0;
  int n_;
  int line_ = 0;

public:
  void set_line(int l) { line_ = l; }
};

}  // namespace detail

inline ChartExpr parse_chart(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  ChartExpr chart;
  bool have_dim = false;
  std::vector<bool> defined;
  while (std::getline(is, line)) {
    ++lineno;
    // strip comments and whitespace-only lines
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.pop_back();
    if (!have_dim) {
      std::istringstream ls(line);
      std::string kw;
      ls >> kw >> chart.n;
      if (kw != "dim" || ls.fail() || (chart.n != 1 && chart.n != 2))
        throw SyntaxError("expected 'dim 1' or 'dim 2'", lineno, 1);
      have_dim = true;
      chart.defs.resize(chart.n);
      defined.assign(chart.n, false);
      continue;
    }
    if (line.empty() || line[0] != 'Y') throw SyntaxError("expected 'Y<i> = ...'", lineno, 1);
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw SyntaxError("missing '='", lineno, 1);
    int yi = 0;
    try {
      yi = std::stoi(line.substr(1, eq - 1));
    } catch (...) {
      throw SyntaxError("bad Y index", lineno, 2);
    }
    if (yi < 1 || yi > chart.n)
      throw IndexOutOfRange("Y index " + std::to_string(yi) + " out of range for dim " +
                            std::to_string(chart.n));
    if (defined[yi - 1]) throw SyntaxError("duplicate definition of Y" + std::to_string(yi), lineno, 1);
    detail::ChartParser parser(line.substr(eq + 1), chart.n);
    parser.set_line(lineno);
    chart.defs[yi - 1] = parser.parse_expression();
    defined[yi - 1] = true;
  }
  if (!have_dim) throw SyntaxError("empty chart text", 1, 1);
  for (int i = 0; i < chart.n; ++i)
    if (!defined[i]) throw SyntaxError("missing definition of Y" + std::to_string(i + 1), lineno, 1);
  return chart;
}

}  // namespace planegeo
