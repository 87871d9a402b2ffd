#include "poisson4d/expr.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace p4d {

struct Expr::Node {
  Op op = Op::constant;
  double value = 0.0;
  int var = 0;
  Expr a;
  Expr b;
  unsigned mask = 0;
  std::size_t count = 1;
};

namespace {

std::string describe_at(const std::string& what, const std::string& sub, const Point4& x) {
  return what + " in '" + sub + "' at " + format_point(x);
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t offset)
    : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

EvalError::EvalError(const std::string& what, std::string subexpr, const Point4& at)
    : Error(describe_at(what, subexpr, at)), subexpr_(std::move(subexpr)), point_(at) {}

bool is_unary(Op op) noexcept {
  switch (op) {
    case Op::neg:
    case Op::sin:
    case Op::cos:
    case Op::exp:
    case Op::ln:
    case Op::sqrt:
    case Op::tanh:
      return true;
    default:
      return false;
  }
}

bool is_binary(Op op) noexcept {
  switch (op) {
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow:
      return true;
    default:
      return false;
  }
}

std::string_view function_name(Op op) noexcept {
  switch (op) {
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::exp: return "exp";
    case Op::ln: return "ln";
    case Op::sqrt: return "sqrt";
    case Op::tanh: return "tanh";
    default: return "";
  }
}

// Only the default-constructed placeholder children of leaf nodes hold a null
// node; every public accessor goes through a non-null node.
Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>(Node{Op::constant, value, 0, Expr(nullptr), Expr(nullptr), 0U, 1});
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 1 || index > 4) {
    throw Error("variable index " + std::to_string(index) + " outside 1..4");
  }
  auto n = std::make_shared<Node>(
      Node{Op::variable, 0.0, index, Expr(nullptr), Expr(nullptr), 1U << (index - 1), 1});
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr arg) {
  if (!is_unary(op)) throw Error("Expr::unary called with a non-unary operator");
  unsigned mask = arg.variable_mask();
  std::size_t count = arg.node_count() + 1;
  auto n = std::make_shared<Node>(Node{op, 0.0, 0, std::move(arg), Expr(nullptr), mask, count});
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  if (!is_binary(op)) throw Error("Expr::binary called with a non-binary operator");
  if (op == Op::pow && rhs.variable_mask() != 0U) {
    throw Error("exponent must be a numeric constant");
  }
  unsigned mask = lhs.variable_mask() | rhs.variable_mask();
  std::size_t count = lhs.node_count() + rhs.node_count() + 1;
  auto n = std::make_shared<Node>(Node{op, 0.0, 0, std::move(lhs), std::move(rhs), mask, count});
  return Expr(std::move(n));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
int Expr::var() const noexcept { return node_->var; }
const Expr& Expr::arg() const { return node_->a; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }
unsigned Expr::variable_mask() const noexcept { return node_ ? node_->mask : 0U; }
std::size_t Expr::node_count() const noexcept { return node_ ? node_->count : 0U; }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

bool is_integer_exponent(double c) { return std::isfinite(c) && c == std::floor(c) && std::fabs(c) <= 1e6; }

double eval_node(const Expr& e, const Point4& x) {
  auto fault = [&](const std::string& what) -> double { throw EvalError(what, e.str(), x); };
  auto checked = [&](double r) -> double {
    if (!std::isfinite(r)) fault("non-finite result");
    return r;
  };
  switch (e.op()) {
    case Op::constant:
      return e.value();
    case Op::variable:
      return x[static_cast<std::size_t>(e.var() - 1)];
    case Op::neg:
      return -eval_node(e.arg(), x);
    case Op::sin:
      return std::sin(eval_node(e.arg(), x));
    case Op::cos:
      return std::cos(eval_node(e.arg(), x));
    case Op::tanh:
      return std::tanh(eval_node(e.arg(), x));
    case Op::exp:
      return checked(std::exp(eval_node(e.arg(), x)));
    case Op::ln: {
      double a = eval_node(e.arg(), x);
      if (!(a > 0.0)) fault("ln of nonpositive value " + format_number(a));
      return std::log(a);
    }
    case Op::sqrt: {
      double a = eval_node(e.arg(), x);
      if (a < 0.0) fault("sqrt of negative value " + format_number(a));
      return std::sqrt(a);
    }
    case Op::add:
      return checked(eval_node(e.lhs(), x) + eval_node(e.rhs(), x));
    case Op::sub:
      return checked(eval_node(e.lhs(), x) - eval_node(e.rhs(), x));
    case Op::mul:
      return checked(eval_node(e.lhs(), x) * eval_node(e.rhs(), x));
    case Op::div: {
      double num = eval_node(e.lhs(), x);
      double den = eval_node(e.rhs(), x);
      if (den == 0.0) fault("division by zero");
      return checked(num / den);
    }
    case Op::pow: {
      double base = eval_node(e.lhs(), x);
      double c = eval_node(e.rhs(), x);
      if (base == 0.0 && c < 0.0) fault("zero raised to a negative power");
      if (!is_integer_exponent(c) && base < 0.0) {
        fault("negative base " + format_number(base) + " with non-integer exponent");
      }
      return checked(std::pow(base, c));
    }
  }
  return 0.0;
}

}  // namespace

double Expr::eval(const Point4& x) const { return eval_node(*this, x); }

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_point(const Point4& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += format_number(x[i]);
  }
  return s + ")";
}

namespace {

bool is_additive(Op op) { return op == Op::add || op == Op::sub; }
bool is_multiplicative(Op op) { return op == Op::mul || op == Op::div; }

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::constant:
      if (std::signbit(e.value())) {
        out += '(';
        out += format_number(e.value());
        out += ')';
      } else {
        out += format_number(e.value());
      }
      return;
    case Op::variable:
      out += 'x';
      out += static_cast<char>('0' + e.var());
      return;
    case Op::neg:
      out += '-';
      print_wrapped(e.arg(), is_binary(e.arg().op()), out);
      return;
    case Op::sin:
    case Op::cos:
    case Op::exp:
    case Op::ln:
    case Op::sqrt:
    case Op::tanh:
      out += function_name(e.op());
      out += '(';
      print(e.arg(), out);
      out += ')';
      return;
    case Op::add:
    case Op::sub:
      print(e.lhs(), out);
      out += e.op() == Op::add ? " + " : " - ";
      print_wrapped(e.rhs(), is_additive(e.rhs().op()), out);
      return;
    case Op::mul:
    case Op::div:
      print_wrapped(e.lhs(), is_additive(e.lhs().op()), out);
      out += e.op() == Op::mul ? '*' : '/';
      print_wrapped(e.rhs(), is_additive(e.rhs().op()) || is_multiplicative(e.rhs().op()), out);
      return;
    case Op::pow:
      print_wrapped(e.lhs(), is_binary(e.lhs().op()), out);
      out += '^';
      print_wrapped(e.rhs(), is_binary(e.rhs().op()), out);
      return;
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' unary)?
//   unary  := '-' unary | atom
//   atom   := number | x1..x4 | func '(' expr ')' | '(' expr ')'

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const { throw ParseError(what, at); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) {
        e = Expr::binary(Op::add, e, term());
      } else if (accept('-')) {
        e = Expr::binary(Op::sub, e, term());
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*')) {
        e = Expr::binary(Op::mul, e, factor());
      } else if (accept('/')) {
        e = Expr::binary(Op::div, e, factor());
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    Expr base = unary();
    if (accept('^')) {
      skip_ws();
      std::size_t at = pos_;
      Expr exponent = unary();
      if (exponent.variable_mask() != 0U) fail_at("exponent must be a numeric constant", at);
      return Expr::binary(Op::pow, base, exponent);
    }
    return base;
  }

  Expr unary() {
    if (accept('-')) return Expr::unary(Op::neg, unary());
    return atom();
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t int_digits = digits();
    std::size_t frac_digits = 0;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      frac_digits = digits();
    }
    if (int_digits + frac_digits == 0) fail_at("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail_at("malformed exponent in number", mark);
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_ || !std::isfinite(v)) {
      fail_at("number out of range", start);
    }
    return Expr::constant(v);
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
      if (!ok) break;
      ++pos_;
    }
    std::string_view name = text_.substr(start, pos_ - start);
    if (name.size() >= 2 && name[0] == 'x') {
      bool all_digits = true;
      for (char c : name.substr(1)) all_digits = all_digits && c >= '0' && c <= '9';
      if (all_digits) {
        if (name.size() == 2 && name[1] >= '1' && name[1] <= '4') return Expr::variable(name[1] - '0');
        fail_at("variable index outside 1..4: '" + std::string(name) + "'", start);
      }
    }
    static constexpr std::pair<std::string_view, Op> kFunctions[] = {
        {"sin", Op::sin}, {"cos", Op::cos},   {"exp", Op::exp},
        {"ln", Op::ln},   {"sqrt", Op::sqrt}, {"tanh", Op::tanh},
    };
    for (const auto& [fname, op] : kFunctions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after function name '" + std::string(name) + "'");
        Expr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return Expr::unary(op, arg);
      }
    }
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::constant:
      return a.value() == b.value() && std::signbit(a.value()) == std::signbit(b.value());
    case Op::variable:
      return a.var() == b.var();
    default:
      break;
  }
  if (is_unary(a.op())) return structurally_equal(a.arg(), b.arg());
  return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
}

// ---------------------------------------------------------------------------
// Folding builders

namespace build {

namespace {
Expr fold_or(double v, Expr fallback) { return std::isfinite(v) ? Expr::constant(v) : std::move(fallback); }
}  // namespace

Expr constant(double v) { return Expr::constant(v); }
Expr var(int index) { return Expr::variable(index); }

Expr neg(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.op() == Op::neg) return a.arg();
  return Expr::unary(Op::neg, a);
}

Expr add(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return fold_or(a.value() + b.value(), Expr::binary(Op::add, a, b));
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.op() == Op::neg) return sub(a, b.arg());
  return Expr::binary(Op::add, a, b);
}

Expr sub(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return fold_or(a.value() - b.value(), Expr::binary(Op::sub, a, b));
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return neg(b);
  if (b.op() == Op::neg) return add(a, b.arg());
  return Expr::binary(Op::sub, a, b);
}

Expr mul(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return fold_or(a.value() * b.value(), Expr::binary(Op::mul, a, b));
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return neg(b);
  if (b.is_constant(-1.0)) return neg(a);
  if (b.is_constant()) return mul(b, a);  // constant factor first
  return Expr::binary(Op::mul, a, b);
}

Expr div(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0) {
    return fold_or(a.value() / b.value(), Expr::binary(Op::div, a, b));
  }
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::binary(Op::div, a, b);
}

Expr pow(const Expr& base, double exponent) {
  if (exponent == 0.0) return Expr::constant(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant()) {
    double v = std::pow(base.value(), exponent);
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr::binary(Op::pow, base, Expr::constant(exponent));
}

Expr apply(Op fn, const Expr& a) {
  if (fn == Op::neg) return neg(a);
  if (a.is_constant()) {
    try {
      return Expr::constant(Expr::unary(fn, a).eval(Point4{}));
    } catch (const EvalError&) {
      // leave the fault to evaluation time
    }
  }
  return Expr::unary(fn, a);
}

}  // namespace build

// ---------------------------------------------------------------------------
// Differentiation

Expr differentiate(const Expr& e, int index) {
  using namespace build;
  if (!e.depends_on(index)) return constant(0.0);
  switch (e.op()) {
    case Op::constant:
      return constant(0.0);
    case Op::variable:
      return constant(e.var() == index ? 1.0 : 0.0);
    case Op::neg:
      return neg(differentiate(e.arg(), index));
    case Op::sin:
      return mul(apply(Op::cos, e.arg()), differentiate(e.arg(), index));
    case Op::cos:
      return mul(neg(apply(Op::sin, e.arg())), differentiate(e.arg(), index));
    case Op::exp:
      return mul(e, differentiate(e.arg(), index));
    case Op::ln:
      return div(differentiate(e.arg(), index), e.arg());
    case Op::sqrt:
      return div(differentiate(e.arg(), index), mul(constant(2.0), e));
    case Op::tanh:
      return mul(sub(constant(1.0), pow(e, 2.0)), differentiate(e.arg(), index));
    case Op::add:
      return add(differentiate(e.lhs(), index), differentiate(e.rhs(), index));
    case Op::sub:
      return sub(differentiate(e.lhs(), index), differentiate(e.rhs(), index));
    case Op::mul:
      return add(mul(differentiate(e.lhs(), index), e.rhs()), mul(e.lhs(), differentiate(e.rhs(), index)));
    case Op::div: {
      const Expr& u = e.lhs();
      const Expr& v = e.rhs();
      Expr du = differentiate(u, index);
      Expr dv = differentiate(v, index);
      if (!v.depends_on(index)) return div(du, v);
      return div(sub(mul(du, v), mul(u, dv)), pow(v, 2.0));
    }
    case Op::pow: {
      double c = e.rhs().eval(Point4{});
      return mul(mul(constant(c), pow(e.lhs(), c - 1.0)), differentiate(e.lhs(), index));
    }
  }
  return constant(0.0);
}

Expr substitute(const Expr& e, int index, double value) {
  using namespace build;
  if (!e.depends_on(index)) return e;
  switch (e.op()) {
    case Op::variable:
      return constant(value);
    case Op::add:
      return add(substitute(e.lhs(), index, value), substitute(e.rhs(), index, value));
    case Op::sub:
      return sub(substitute(e.lhs(), index, value), substitute(e.rhs(), index, value));
    case Op::mul:
      return mul(substitute(e.lhs(), index, value), substitute(e.rhs(), index, value));
    case Op::div:
      return div(substitute(e.lhs(), index, value), substitute(e.rhs(), index, value));
    case Op::pow:
      return pow(substitute(e.lhs(), index, value), e.rhs().eval(Point4{}));
    default:
      return apply(e.op(), substitute(e.arg(), index, value));
  }
}

}  // namespace p4d
