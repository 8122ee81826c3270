#include "axistokes/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace axistokes {

Expr::Expr(double c) : node_(std::make_shared<const Node>(Node{Op::Const, c, nullptr, nullptr})) {}

Expr Expr::var(Var v) {
  const Op op = v == Var::R ? Op::VarR : v == Var::Z ? Op::VarZ : Op::VarTheta;
  return Expr(std::make_shared<const Node>(Node{op, 0.0, nullptr, nullptr}));
}

Expr Expr::make(Op op, const Expr& a, const Expr& b) {
  return Expr(std::make_shared<const Node>(Node{op, 0.0, a.node_, b.node_}));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() + b.constant_value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expr::make(Expr::Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() - b.constant_value());
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  return Expr::make(Expr::Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() * b.constant_value());
  if (a.is_zero() || b.is_zero()) return Expr(0.0);
  if (a.is_constant() && a.constant_value() == 1.0) return b;
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  if (a.is_constant() && a.constant_value() == -1.0) return -b;
  if (b.is_constant() && b.constant_value() == -1.0) return -a;
  return Expr::make(Expr::Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw ExprError("division by the constant zero");
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() / b.constant_value());
  if (a.is_zero()) return Expr(0.0);
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  return Expr::make(Expr::Op::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.constant_value());
  if (a.op() == Expr::Op::Neg) return Expr(a.node_->a);
  return Expr::make(Expr::Op::Neg, a);
}

Expr pow(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(std::pow(a.constant_value(), b.constant_value()));
  if (b.is_constant() && b.constant_value() == 0.0) return Expr(1.0);
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  if (a.is_zero()) return Expr(0.0);
  return Expr::make(Expr::Op::Pow, a, b);
}

Expr sin(const Expr& a) {
  if (a.is_constant()) return Expr(std::sin(a.constant_value()));
  return Expr::make(Expr::Op::Sin, a);
}

Expr cos(const Expr& a) {
  if (a.is_constant()) return Expr(std::cos(a.constant_value()));
  return Expr::make(Expr::Op::Cos, a);
}

Expr exp(const Expr& a) {
  if (a.is_constant()) return Expr(std::exp(a.constant_value()));
  return Expr::make(Expr::Op::Exp, a);
}

Expr log(const Expr& a) {
  if (a.is_constant()) return Expr(std::log(a.constant_value()));
  return Expr::make(Expr::Op::Log, a);
}

double Expr::eval(double r, double z, double theta) const { return eval_node(*node_, r, z, theta); }

double Expr::eval_node(const Node& n, double r, double z, double theta) {
  auto A = [&] { return eval_node(*n.a, r, z, theta); };
  auto B = [&] { return eval_node(*n.b, r, z, theta); };
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::VarR: return r;
    case Op::VarZ: return z;
    case Op::VarTheta: return theta;
    case Op::Add: return A() + B();
    case Op::Sub: return A() - B();
    case Op::Mul: return A() * B();
    case Op::Div: return A() / B();
    case Op::Pow: {
      const double e = B();
      if (n.b->op == Op::Const && e == std::round(e) && std::abs(e) <= 16) {
        const double base = A();
        double out = 1.0;
        for (int i = 0; i < std::abs(static_cast<int>(e)); ++i) out *= base;
        return e < 0 ? 1.0 / out : out;
      }
      return std::pow(A(), e);
    }
    case Op::Neg: return -A();
    case Op::Sin: return std::sin(A());
    case Op::Cos: return std::cos(A());
    case Op::Exp: return std::exp(A());
    case Op::Log: return std::log(A());
  }
  return 0.0;
}

bool Expr::depends_on(Var v) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return false;
    case Op::VarR: return v == Var::R;
    case Op::VarZ: return v == Var::Z;
    case Op::VarTheta: return v == Var::Theta;
    default: break;
  }
  return (n.a && Expr(n.a).depends_on(v)) || (n.b && Expr(n.b).depends_on(v));
}

Expr Expr::diff(Var v) const {
  const Node& n = *node_;
  const Expr a = n.a ? Expr(n.a) : Expr();
  const Expr b = n.b ? Expr(n.b) : Expr();
  switch (n.op) {
    case Op::Const: return Expr(0.0);
    case Op::VarR: return Expr(v == Var::R ? 1.0 : 0.0);
    case Op::VarZ: return Expr(v == Var::Z ? 1.0 : 0.0);
    case Op::VarTheta: return Expr(v == Var::Theta ? 1.0 : 0.0);
    case Op::Add: return a.diff(v) + b.diff(v);
    case Op::Sub: return a.diff(v) - b.diff(v);
    case Op::Mul: return a.diff(v) * b + a * b.diff(v);
    case Op::Div: return (a.diff(v) * b - a * b.diff(v)) / (b * b);
    case Op::Neg: return -a.diff(v);
    case Op::Sin: return cos(a) * a.diff(v);
    case Op::Cos: return -(sin(a) * a.diff(v));
    case Op::Exp: return *this * a.diff(v);
    case Op::Log: return a.diff(v) / a;
    case Op::Pow:
      if (!b.depends_on(v)) return b * pow(a, b - Expr(1.0)) * a.diff(v);
      return *this * (b.diff(v) * log(a) + b * a.diff(v) / a);
  }
  return Expr(0.0);
}

std::string Expr::str() const {
  const Node& n = *node_;
  auto A = [&] { return Expr(n.a).str(); };
  auto B = [&] { return Expr(n.b).str(); };
  switch (n.op) {
    case Op::Const: {
      std::ostringstream os;
      os.precision(17);
      os << n.value;
      return n.value < 0 ? "(" + os.str() + ")" : os.str();
    }
    case Op::VarR: return "r";
    case Op::VarZ: return "z";
    case Op::VarTheta: return "theta";
    case Op::Add: return "(" + A() + " + " + B() + ")";
    case Op::Sub: return "(" + A() + " - " + B() + ")";
    case Op::Mul: return "(" + A() + " * " + B() + ")";
    case Op::Div: return "(" + A() + " / " + B() + ")";
    case Op::Pow: return "(" + A() + " ^ " + B() + ")";
    case Op::Neg: return "(-" + A() + ")";
    case Op::Sin: return "sin(" + A() + ")";
    case Op::Cos: return "cos(" + A() + ")";
    case Op::Exp: return "exp(" + A() + ")";
    case Op::Log: return "log(" + A() + ")";
  }
  return "?";
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Expr parse() {
    Expr e = expression();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ExprError("expression error at column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }
  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*'))
        e = e * unary();
      else if (accept('/'))
        e = e / unary();
      else
        return e;
    }
  }
  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      Expr e = expression();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      return Expr(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "r") return Expr::r();
      if (id == "z") return Expr::z();
      if (id == "theta") return Expr::theta();
      if (id == "pi") return Expr(std::numbers::pi);
      if (id == "sin" || id == "cos" || id == "exp") {
        if (!accept('(')) fail("expected '(' after " + id);
        Expr arg = expression();
        if (!accept(')')) fail("expected ')'");
        return id == "sin" ? sin(arg) : id == "cos" ? cos(arg) : exp(arg);
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(text).parse(); }

}  // namespace axistokes
