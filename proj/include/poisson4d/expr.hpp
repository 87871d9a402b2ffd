#pragma once

// Scalar expression trees over up to four real variables x1..x4.
//
// Trees are immutable and shared; copying an Expr is a reference-count bump.
// The parser builds trees verbatim (no folding) so that printing and
// reparsing reproduces the same structure. Trees produced by the builders in
// namespace p4d::build (and therefore by differentiate) fold trivial
// constant arithmetic so derivatives stay readable.

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace p4d {

using Point4 = std::array<double, 4>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error, unknown identifier or bad variable index; carries the byte
/// offset into the parsed text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Domain fault during evaluation (ln of a nonpositive value, division by
/// zero, non-finite result, ...).
class EvalError : public Error {
 public:
  EvalError(const std::string& what, std::string subexpr, const Point4& at);
  const std::string& subexpression() const noexcept { return subexpr_; }
  const Point4& point() const noexcept { return point_; }

 private:
  std::string subexpr_;
  Point4 point_;
};

enum class Op : std::uint8_t {
  constant,
  variable,
  neg,
  sin,
  cos,
  exp,
  ln,
  sqrt,
  tanh,
  add,
  sub,
  mul,
  div,
  pow,
};

bool is_unary(Op op) noexcept;
bool is_binary(Op op) noexcept;
std::string_view function_name(Op op) noexcept;

class Expr {
 public:
  struct Node;

  /// The constant 0.
  Expr();

  static Expr constant(double value);
  /// Variable x_index, index in 1..4.
  static Expr variable(int index);
  /// Raw unary node; op must be neg or one of the named functions.
  static Expr unary(Op op, Expr arg);
  /// Raw binary node. For Op::pow the exponent must not reference any
  /// variable.
  static Expr binary(Op op, Expr lhs, Expr rhs);

  Op op() const noexcept;
  double value() const noexcept;  // constant nodes only
  int var() const noexcept;       // variable nodes only
  const Expr& arg() const;        // unary nodes
  const Expr& lhs() const;        // binary nodes
  const Expr& rhs() const;        // binary nodes

  /// Bit (i-1) set when x_i occurs in the tree.
  unsigned variable_mask() const noexcept;
  bool depends_on(int index) const noexcept { return (variable_mask() >> (index - 1)) & 1U; }
  bool is_constant() const noexcept { return op() == Op::constant; }
  /// True for a constant node holding exactly v.
  bool is_constant(double v) const noexcept { return is_constant() && value() == v; }
  std::size_t node_count() const noexcept;

  /// Throws EvalError on domain faults.
  double eval(const Point4& x) const;

  /// Text in the input grammar; reparses to an equal value. Trees produced by
  /// parse() reparse to a structurally identical tree.
  std::string str() const;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Expr parse(std::string_view text);

bool structurally_equal(const Expr& a, const Expr& b);

/// Exact symbolic partial derivative with respect to x_index.
Expr differentiate(const Expr& e, int index);

/// Replaces x_index by a constant (with folding).
Expr substitute(const Expr& e, int index, double value);

/// Folding builders.
namespace build {
Expr constant(double v);
Expr var(int index);
Expr neg(const Expr& a);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr pow(const Expr& base, double exponent);
Expr apply(Op fn, const Expr& a);
}  // namespace build

inline Expr operator+(const Expr& a, const Expr& b) { return build::add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return build::sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return build::mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return build::div(a, b); }
inline Expr operator-(const Expr& a) { return build::neg(a); }

std::string format_number(double v);
std::string format_point(const Point4& x);

}  // namespace p4d
