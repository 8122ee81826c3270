#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>

namespace axistokes {

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Var { R, Z, Theta };

/// Immutable real expression tree over r, z, theta with symbolic differentiation.
class Expr {
 public:
  enum class Op { Const, VarR, VarZ, VarTheta, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };

  Expr() : Expr(0.0) {}
  Expr(double c);  // NOLINT(google-explicit-constructor)

  static Expr var(Var v);
  static Expr r() { return var(Var::R); }
  static Expr z() { return var(Var::Z); }
  static Expr theta() { return var(Var::Theta); }

  double eval(double r, double z, double theta = 0.0) const;
  Expr diff(Var v) const;
  std::string str() const;

  Op op() const { return node_->op; }
  bool is_constant() const { return node_->op == Op::Const; }
  double constant_value() const { return node_->value; }
  bool is_zero() const { return is_constant() && node_->value == 0.0; }
  bool depends_on(Var v) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, const Expr& b);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);

 private:
  struct Node {
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Op op, const Expr& a, const Expr& b = Expr());
  static double eval_node(const Node& n, double r, double z, double theta);

  std::shared_ptr<const Node> node_;
};

/// Parses `+ - * / ^`, sin, cos, exp, r, z, theta, pi and numeric literals.
Expr parse_expr(const std::string& text);

/// Complex-valued expression as a pair of real trees.
struct CExpr {
  Expr re, im;

  CExpr() = default;
  CExpr(Expr re_, Expr im_ = Expr()) : re(std::move(re_)), im(std::move(im_)) {}  // NOLINT
  static CExpr i() { return CExpr(0.0, 1.0); }

  std::complex<double> eval(double r, double z, double theta = 0.0) const {
    return {re.eval(r, z, theta), im.eval(r, z, theta)};
  }
  CExpr diff(Var v) const { return {re.diff(v), im.diff(v)}; }
  CExpr conj() const { return {re, -im}; }

  friend CExpr operator+(const CExpr& a, const CExpr& b) { return {a.re + b.re, a.im + b.im}; }
  friend CExpr operator-(const CExpr& a, const CExpr& b) { return {a.re - b.re, a.im - b.im}; }
  friend CExpr operator-(const CExpr& a) { return {-a.re, -a.im}; }
  friend CExpr operator*(const CExpr& a, const CExpr& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  /// Division by a real expression.
  friend CExpr operator/(const CExpr& a, const Expr& d) { return {a.re / d, a.im / d}; }
};

}  // namespace axistokes
