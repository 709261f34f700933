#pragma once

// Scalar coefficient expressions over chart variables.
//
// Grammar (whitespace is insignificant):
//
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := ('-' | '+') unary | power
//   power    := primary ('^' exponent)*            left associative
//   exponent := ('-' | '+')? primary               must not reference variables
//   primary  := number | name | func '(' expr ')' | '(' expr ')'
//   func     := 'sin' | 'cos' | 'exp' | 'sqrt' | 'log'
//   number   := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//
// Precedence from tightest: '^', unary minus, '*' '/', '+' '-'. So "-x^2" is -(x^2).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subriemann/dual.hpp"

namespace subriemann {

class Expr {
 public:
  enum class Op : std::uint8_t { Const, Var, Neg, Sin, Cos, Exp, Sqrt, Log, Add, Sub, Mul, Div, Pow };

  static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

  struct Node {
    Op op = Op::Const;
    double value = 0.0;    // Const value, or the exponent of Pow
    std::size_t var = 0;   // Var index
    std::size_t offset = kNoOffset;  // byte offset in the parsed source, if any
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Expr();  // the constant 0
  explicit Expr(double c);

  static Expr constant(double c);
  static Expr variable(std::size_t index);
  static Expr from_node(std::shared_ptr<const Node> node);

  const Node& root() const { return *root_; }
  std::shared_ptr<const Node> node() const { return root_; }

  bool is_constant() const;
  /// Value when is_constant(); throws otherwise.
  double constant_value() const;
  /// One past the largest variable index referenced (0 for constants).
  std::size_t arity() const;

  /// Evaluation on any scalar of the derivative tower (double, Real1..Real5).
  template <class T>
  T eval(std::span<const T> x) const;

  double operator()(std::span<const double> x) const { return eval<double>(x); }

  /// Exact forward-mode derivative grad(e)(point) . direction.
  double directional_derivative(std::span<const double> point,
                                std::span<const double> direction) const;

  /// Source text using the given variable names; reparses to a structurally equal tree.
  std::string to_string(std::span<const std::string> names) const;

  bool structurally_equal(const Expr& other) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr sqrt(const Expr& a);
  friend Expr log(const Expr& a);
  friend Expr pow(const Expr& a, double exponent);

  struct Program;  // compiled postfix form, defined in expr.cpp

 private:

  void compile();

  std::shared_ptr<const Node> root_;
  std::shared_ptr<const Program> program_;
};

/// Parses `source` over the ordered chart variable names.
/// Throws SyntaxError (with byte offset) or UnknownVariable.
Expr parse(std::string_view source, std::span<const std::string> variables);

extern template double Expr::eval<double>(std::span<const double>) const;
extern template Real1 Expr::eval<Real1>(std::span<const Real1>) const;
extern template Real2 Expr::eval<Real2>(std::span<const Real2>) const;
extern template Real3 Expr::eval<Real3>(std::span<const Real3>) const;
extern template Real4 Expr::eval<Real4>(std::span<const Real4>) const;
extern template Real5 Expr::eval<Real5>(std::span<const Real5>) const;

}  // namespace subriemann
