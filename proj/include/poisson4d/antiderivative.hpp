#pragma once

#include <memory>
#include <optional>
#include <string>

#include "poisson4d/domain.hpp"
#include "poisson4d/expr.hpp"

namespace p4d {

/// A function of the single variable x_var on a closed interval.
class UnivariateFn {
 public:
  UnivariateFn() = default;
  /// Throws p4d::Error if expr references a variable other than x_var.
  UnivariateFn(Expr expr, int var, Interval interval);

  const Expr& expr() const noexcept { return expr_; }
  int var() const noexcept { return var_; }
  const Interval& interval() const noexcept { return interval_; }

  double operator()(double t) const;
  /// Exact derivative d/dt as a univariate function on the same interval.
  UnivariateFn derivative() const;
  bool is_constant_expr() const noexcept { return expr_.variable_mask() == 0U; }

 private:
  Expr expr_;
  int var_ = 1;
  Interval interval_;
};

/// Closed-form antiderivative of f vanishing at `base`, or nullopt when f is
/// outside the integration table (polynomials, (a t + b)^n, 1/(a t + b),
/// sin/cos/exp/sqrt of linear arguments, and constant multiples and sums of
/// these).
std::optional<Expr> symbolic_antiderivative(const UnivariateFn& f, double base);

/// F with F(base) = 0 and F' = f. Symbolic when the table applies, otherwise
/// adaptive Simpson from base (abs tol 1e-12, depth 40) on every call.
class Antiderivative {
 public:
  Antiderivative() = default;
  /// base defaults to the midpoint of f's interval.
  static Antiderivative of(const UnivariateFn& f, std::optional<double> base = std::nullopt);

  /// Throws QuadratureError when the quadrature path fails to converge.
  double operator()(double t) const;

  bool symbolic() const noexcept { return closed_form_.has_value(); }
  const std::optional<Expr>& expression() const noexcept { return closed_form_; }
  double base() const noexcept { return base_; }
  const UnivariateFn& integrand() const noexcept { return f_; }
  /// Closed form text, or a "quadrature-backed" descriptor.
  std::string describe() const;

 private:
  UnivariateFn f_;
  double base_ = 0.0;
  std::optional<Expr> closed_form_;
};

}  // namespace p4d
