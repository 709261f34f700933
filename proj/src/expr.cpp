#include "subriemann/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "subriemann/errors.hpp"

namespace subriemann {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Op;

NodePtr make_const(double c, std::size_t offset = Expr::kNoOffset) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Const;
  n->value = c;
  n->offset = offset;
  return n;
}

NodePtr make_var(std::size_t index, std::size_t offset = Expr::kNoOffset) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Var;
  n->var = index;
  n->offset = offset;
  return n;
}

NodePtr make_unary(Op op, NodePtr arg, std::size_t offset = Expr::kNoOffset) {
  if (op == Op::Neg && arg->op == Op::Const) return make_const(-arg->value, offset);
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->lhs = std::move(arg);
  n->offset = offset;
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b, std::size_t offset = Expr::kNoOffset) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  n->offset = offset;
  return n;
}

NodePtr make_pow(NodePtr base, double exponent, std::size_t offset = Expr::kNoOffset) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Pow;
  n->lhs = std::move(base);
  n->value = exponent;
  n->offset = offset;
  return n;
}

bool references_variables(const Expr::Node& n) {
  if (n.op == Op::Var) return true;
  if (n.lhs && references_variables(*n.lhs)) return true;
  if (n.rhs && references_variables(*n.rhs)) return true;
  return false;
}

std::size_t arity_of(const Expr::Node& n) {
  std::size_t a = n.op == Op::Var ? n.var + 1 : 0;
  if (n.lhs) a = std::max(a, arity_of(*n.lhs));
  if (n.rhs) a = std::max(a, arity_of(*n.rhs));
  return a;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Const: return "constant";
    case Op::Var: return "variable";
    case Op::Neg: return "negation";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    case Op::Log: return "log";
    case Op::Add: return "addition";
    case Op::Sub: return "subtraction";
    case Op::Mul: return "multiplication";
    case Op::Div: return "division";
    case Op::Pow: return "power";
  }
  return "?";
}

bool is_integer_exponent(double r) {
  return std::nearbyint(r) == r && std::fabs(r) < 2147483648.0;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> vars) : src_(src), vars_(vars) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expression");
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(pos_, expected, std::string(src_));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        const std::size_t at = pos_;
        const Op op = src_[pos_] == '+' ? Op::Add : Op::Sub;
        ++pos_;
        NodePtr rhs = parse_term();
        lhs = make_binary(op, lhs, rhs, at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (pos_ < src_.size() && (src_[pos_] == '*' || src_[pos_] == '/')) {
        const std::size_t at = pos_;
        const Op op = src_[pos_] == '*' ? Op::Mul : Op::Div;
        ++pos_;
        NodePtr rhs = parse_unary();
        lhs = make_binary(op, lhs, rhs, at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      const std::size_t at = pos_;
      const bool neg = src_[pos_] == '-';
      ++pos_;
      NodePtr arg = parse_unary();
      return neg ? make_unary(Op::Neg, arg, at) : arg;
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    while (peek('^')) {
      const std::size_t at = pos_;
      ++pos_;
      skip_ws();
      bool neg = false;
      if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
        neg = src_[pos_] == '-';
        ++pos_;
      }
      const std::size_t exp_at = pos_;
      NodePtr e = parse_primary();
      if (references_variables(*e)) {
        pos_ = exp_at;
        fail("constant exponent");
      }
      double r = Expr::from_node(e).eval<double>({});
      if (neg) r = -r;
      base = make_pow(base, r, at);
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expression");
    const char c = src_[pos_];
    const std::size_t at = pos_;
    if (c == '(') {
      ++pos_;
      skip_ws();
      if (pos_ >= src_.size()) fail("expression");
      NodePtr e = parse_expr();
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != ')') fail("')'");
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
        ++end;
      const std::string name(src_.substr(pos_, end - pos_));
      pos_ = end;
      if (peek('(')) {
        Op op;
        if (name == "sin") op = Op::Sin;
        else if (name == "cos") op = Op::Cos;
        else if (name == "exp") op = Op::Exp;
        else if (name == "sqrt") op = Op::Sqrt;
        else if (name == "log") op = Op::Log;
        else {
          pos_ = at;
          fail("function name (sin, cos, exp, sqrt, log)");
        }
        ++pos_;
        skip_ws();
        if (pos_ >= src_.size()) fail("expression");
        NodePtr arg = parse_expr();
        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != ')') fail("')'");
        ++pos_;
        return make_unary(op, arg, at);
      }
      const auto it = std::find(vars_.begin(), vars_.end(), name);
      if (it == vars_.end()) throw UnknownVariable(name, at);
      return make_var(static_cast<std::size_t>(it - vars_.begin()), at);
    }
    fail("number, variable, function or '('");
  }

  NodePtr parse_number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      const std::size_t s = end;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      return end > s;
    };
    bool any = digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      any = digits() || any;
    }
    if (!any) fail("number");
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t save = end;
      ++end;
      if (end < src_.size() && (src_[end] == '+' || src_[end] == '-')) ++end;
      if (!digits()) end = save;
    }
    double value = 0.0;
    const auto res = std::from_chars(src_.data() + at, src_.data() + end, value);
    if (res.ec != std::errc()) fail("number");
    pos_ = end;
    return make_const(value, at);
  }

  std::string_view src_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

int precedence(const Expr::Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (v < 0) return "(" + s + ")";
  return s;
}

void print(const Expr::Node& n, std::span<const std::string> names, std::string& out) {
  auto child = [&](const Expr::Node& c, bool parens) {
    if (parens) out += '(';
    print(c, names, out);
    if (parens) out += ')';
  };
  switch (n.op) {
    case Op::Const: out += format_number(n.value); return;
    case Op::Var:
      out += n.var < names.size() ? names[n.var] : "x" + std::to_string(n.var + 1);
      return;
    case Op::Neg:
      out += '-';
      child(*n.lhs, precedence(*n.lhs) < 3);
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Sqrt:
    case Op::Log:
      out += op_name(n.op);
      child(*n.lhs, true);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = precedence(n);
      child(*n.lhs, precedence(*n.lhs) < p);
      out += n.op == Op::Add ? "+" : n.op == Op::Sub ? "-" : n.op == Op::Mul ? "*" : "/";
      child(*n.rhs, precedence(*n.rhs) <= p);
      return;
    }
    case Op::Pow:
      child(*n.lhs, precedence(*n.lhs) < 4);
      out += '^';
      out += format_number(n.value);
      return;
  }
}

bool equal_nodes(const Expr::Node& a, const Expr::Node& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Const: return a.value == b.value;
    case Op::Var: return a.var == b.var;
    case Op::Pow: return a.value == b.value && equal_nodes(*a.lhs, *b.lhs);
    default: break;
  }
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !equal_nodes(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !equal_nodes(*a.rhs, *b.rhs)) return false;
  return true;
}

[[noreturn]] void domain_fail(const char* what, std::size_t offset) {
  std::string msg = what;
  if (offset != Expr::kNoOffset) msg += " at offset " + std::to_string(offset);
  throw DomainError(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// Compiled program: postfix instructions evaluated on a value stack.

struct Expr::Program {
  struct Instr {
    Op op;
    std::size_t var;
    double value;
    std::size_t offset;
  };
  std::vector<Instr> code;
  std::size_t max_stack = 0;
};

namespace {

void emit(const Expr::Node& n, std::vector<Expr::Program::Instr>& code, std::size_t depth,
          std::size_t& max_depth) {
  if (n.lhs) emit(*n.lhs, code, depth, max_depth);
  if (n.rhs) emit(*n.rhs, code, depth + 1, max_depth);
  max_depth = std::max(max_depth, depth + 1);
  code.push_back({n.op, n.var, n.value, n.offset});
}

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double c) : root_(make_const(c)) { compile(); }

Expr Expr::constant(double c) { return Expr(c); }

Expr Expr::variable(std::size_t index) { return from_node(make_var(index)); }

Expr Expr::from_node(std::shared_ptr<const Node> node) {
  Expr e(0.0);
  e.root_ = std::move(node);
  e.compile();
  return e;
}

void Expr::compile() {
  auto prog = std::make_shared<Program>();
  std::size_t max_depth = 0;
  emit(*root_, prog->code, 0, max_depth);
  prog->max_stack = max_depth;
  program_ = std::move(prog);
}

bool Expr::is_constant() const { return root_->op == Op::Const; }

double Expr::constant_value() const {
  if (!is_constant()) throw Error("expression is not a constant");
  return root_->value;
}

std::size_t Expr::arity() const { return arity_of(*root_); }

template <class T>
T Expr::eval(std::span<const T> x) const {
  thread_local std::vector<T> stack;
  if (stack.size() < program_->max_stack) stack.resize(program_->max_stack);
  std::size_t top = 0;
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  for (const auto& in : program_->code) {
    switch (in.op) {
      case Op::Const: stack[top++] = T(in.value); break;
      case Op::Var:
        if (in.var >= x.size()) domain_fail("variable index outside point", in.offset);
        stack[top++] = x[in.var];
        break;
      case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::Sin: stack[top - 1] = sin(stack[top - 1]); break;
      case Op::Cos: stack[top - 1] = cos(stack[top - 1]); break;
      case Op::Exp: stack[top - 1] = exp(stack[top - 1]); break;
      case Op::Sqrt: {
        const double v = primal(stack[top - 1]);
        if (v < 0.0) domain_fail("sqrt of negative value", in.offset);
        if (v == 0.0 && dual_depth_v<T> > 0) domain_fail("sqrt not differentiable at 0", in.offset);
        stack[top - 1] = sqrt(stack[top - 1]);
        break;
      }
      case Op::Log:
        if (primal(stack[top - 1]) <= 0.0) domain_fail("log of non-positive value", in.offset);
        stack[top - 1] = log(stack[top - 1]);
        break;
      case Op::Add:
        --top;
        stack[top - 1] = stack[top - 1] + stack[top];
        break;
      case Op::Sub:
        --top;
        stack[top - 1] = stack[top - 1] - stack[top];
        break;
      case Op::Mul:
        --top;
        stack[top - 1] = stack[top - 1] * stack[top];
        break;
      case Op::Div:
        --top;
        if (primal(stack[top]) == 0.0) domain_fail("division by zero", in.offset);
        stack[top - 1] = stack[top - 1] / stack[top];
        break;
      case Op::Pow: {
        const double b = primal(stack[top - 1]);
        if (is_integer_exponent(in.value)) {
          const long k = static_cast<long>(in.value);
          if (k < 0 && b == 0.0) domain_fail("division by zero in negative power", in.offset);
          stack[top - 1] = ipow(stack[top - 1], k);
        } else {
          if (b <= 0.0) domain_fail("fractional power of non-positive base", in.offset);
          using std::pow;
          stack[top - 1] = pow(stack[top - 1], in.value);
        }
        break;
      }
    }
  }
  return stack[0];
}

template double Expr::eval<double>(std::span<const double>) const;
template Real1 Expr::eval<Real1>(std::span<const Real1>) const;
template Real2 Expr::eval<Real2>(std::span<const Real2>) const;
template Real3 Expr::eval<Real3>(std::span<const Real3>) const;
template Real4 Expr::eval<Real4>(std::span<const Real4>) const;
template Real5 Expr::eval<Real5>(std::span<const Real5>) const;

double Expr::directional_derivative(std::span<const double> point,
                                   std::span<const double> direction) const {
  if (point.size() != direction.size())
    throw Error("directional_derivative: point and direction dimensions differ");
  std::vector<Real1> x(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) x[i] = Real1(point[i], direction[i]);
  return eval<Real1>(x).d;
}

std::string Expr::to_string(std::span<const std::string> names) const {
  std::string out;
  print(*root_, names, out);
  return out;
}

bool Expr::structurally_equal(const Expr& other) const { return equal_nodes(*root_, *other.root_); }

namespace {

bool is_const(const Expr& e, double v) { return e.is_constant() && e.constant_value() == v; }

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() + b.constant_value());
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return Expr::from_node(make_binary(Op::Add, a.node(), b.node()));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() - b.constant_value());
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return -b;
  return Expr::from_node(make_binary(Op::Sub, a.node(), b.node()));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() * b.constant_value());
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return Expr::from_node(make_binary(Op::Mul, a.node(), b.node()));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (is_const(b, 1.0)) return a;
  return Expr::from_node(make_binary(Op::Div, a.node(), b.node()));
}

Expr operator-(const Expr& a) { return Expr::from_node(make_unary(Op::Neg, a.node())); }

Expr sin(const Expr& a) { return Expr::from_node(make_unary(Op::Sin, a.node())); }
Expr cos(const Expr& a) { return Expr::from_node(make_unary(Op::Cos, a.node())); }
Expr exp(const Expr& a) { return Expr::from_node(make_unary(Op::Exp, a.node())); }
Expr sqrt(const Expr& a) { return Expr::from_node(make_unary(Op::Sqrt, a.node())); }
Expr log(const Expr& a) { return Expr::from_node(make_unary(Op::Log, a.node())); }

Expr pow(const Expr& a, double exponent) {
  if (exponent == 1.0) return a;
  return Expr::from_node(make_pow(a.node(), exponent));
}

Expr parse(std::string_view source, std::span<const std::string> variables) {
  for (std::size_t i = 0; i < variables.size(); ++i)
    for (std::size_t j = i + 1; j < variables.size(); ++j)
      if (variables[i] == variables[j])
        throw Error("parse: duplicate variable name '" + variables[i] + "'");
  Parser parser(source, variables);
  return Expr::from_node(parser.parse());
}

}  // namespace subriemann
