#include "poisson4d/antiderivative.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "poisson4d/quadrature.hpp"

namespace p4d {

namespace {

Point4 embed(int var, double t) {
  Point4 x{0.0, 0.0, 0.0, 0.0};
  x[static_cast<std::size_t>(var - 1)] = t;
  return x;
}

}  // namespace

UnivariateFn::UnivariateFn(Expr expr, int var, Interval interval)
    : expr_(std::move(expr)), var_(var), interval_(interval) {
  if (var < 1 || var > 4) throw Error("univariate function variable index outside 1..4");
  unsigned allowed = 1U << (var - 1);
  if ((expr_.variable_mask() & ~allowed) != 0U) {
    throw Error("function of x" + std::to_string(var) + " references another variable: '" + expr_.str() + "'");
  }
  if (!(interval.lo < interval.hi)) throw Error("empty interval for x" + std::to_string(var));
}

double UnivariateFn::operator()(double t) const { return expr_.eval(embed(var_, t)); }

UnivariateFn UnivariateFn::derivative() const { return {differentiate(expr_, var_), var_, interval_}; }

namespace {

using Poly = std::vector<double>;
constexpr std::size_t kMaxDegree = 16;

struct Linear {
  double a;
  double b;
};

class Integrator {
 public:
  Integrator(int var, Interval interval) : var_(var), interval_(interval) {}

  std::optional<Linear> linear(const Expr& e) const {
    if (!e.depends_on(var_)) {
      double c = 0.0;
      if (!constant_value(e, c)) return std::nullopt;
      return Linear{0.0, c};
    }
    switch (e.op()) {
      case Op::variable:
        return Linear{1.0, 0.0};
      case Op::neg: {
        auto l = linear(e.arg());
        if (!l) return std::nullopt;
        return Linear{-l->a, -l->b};
      }
      case Op::add:
      case Op::sub: {
        auto l = linear(e.lhs());
        auto r = linear(e.rhs());
        if (!l || !r) return std::nullopt;
        double s = e.op() == Op::add ? 1.0 : -1.0;
        return Linear{l->a + s * r->a, l->b + s * r->b};
      }
      case Op::mul: {
        auto l = linear(e.lhs());
        auto r = linear(e.rhs());
        if (!l || !r) return std::nullopt;
        if (l->a == 0.0) return Linear{l->b * r->a, l->b * r->b};
        if (r->a == 0.0) return Linear{r->b * l->a, r->b * l->b};
        return std::nullopt;
      }
      case Op::div: {
        auto l = linear(e.lhs());
        double c = 0.0;
        if (!l || e.rhs().depends_on(var_) || !constant_value(e.rhs(), c) || c == 0.0) return std::nullopt;
        return Linear{l->a / c, l->b / c};
      }
      default:
        return std::nullopt;
    }
  }

  std::optional<Poly> polynomial(const Expr& e) const {
    if (!e.depends_on(var_)) {
      double c = 0.0;
      if (!constant_value(e, c)) return std::nullopt;
      return Poly{c};
    }
    switch (e.op()) {
      case Op::variable:
        return Poly{0.0, 1.0};
      case Op::neg: {
        auto p = polynomial(e.arg());
        if (!p) return std::nullopt;
        for (double& c : *p) c = -c;
        return p;
      }
      case Op::add:
      case Op::sub: {
        auto l = polynomial(e.lhs());
        auto r = polynomial(e.rhs());
        if (!l || !r) return std::nullopt;
        double s = e.op() == Op::add ? 1.0 : -1.0;
        Poly out(std::max(l->size(), r->size()), 0.0);
        for (std::size_t i = 0; i < l->size(); ++i) out[i] += (*l)[i];
        for (std::size_t i = 0; i < r->size(); ++i) out[i] += s * (*r)[i];
        return out;
      }
      case Op::mul: {
        auto l = polynomial(e.lhs());
        auto r = polynomial(e.rhs());
        if (!l || !r || l->size() + r->size() - 2 > kMaxDegree) return std::nullopt;
        Poly out(l->size() + r->size() - 1, 0.0);
        for (std::size_t i = 0; i < l->size(); ++i)
          for (std::size_t j = 0; j < r->size(); ++j) out[i + j] += (*l)[i] * (*r)[j];
        return out;
      }
      case Op::div: {
        auto l = polynomial(e.lhs());
        double c = 0.0;
        if (!l || e.rhs().depends_on(var_) || !constant_value(e.rhs(), c) || c == 0.0) return std::nullopt;
        for (double& v : *l) v /= c;
        return l;
      }
      case Op::pow: {
        double n = e.rhs().eval(Point4{});
        if (n < 0.0 || n != std::floor(n) || n > static_cast<double>(kMaxDegree)) return std::nullopt;
        auto base = polynomial(e.lhs());
        if (!base || (base->size() - 1) * static_cast<std::size_t>(n) > kMaxDegree) return std::nullopt;
        Poly out{1.0};
        for (int k = 0; k < static_cast<int>(n); ++k) {
          Poly next(out.size() + base->size() - 1, 0.0);
          for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t j = 0; j < base->size(); ++j) next[i + j] += out[i] * (*base)[j];
          out = std::move(next);
        }
        return out;
      }
      default:
        return std::nullopt;
    }
  }

  /// Some antiderivative of e (any additive constant).
  std::optional<Expr> integrate(const Expr& e) const {
    using namespace build;
    Expr t = var(var_);
    if (!e.depends_on(var_)) return mul(e, t);
    if (auto p = polynomial(e)) {
      Expr out = constant(0.0);
      for (std::size_t k = 0; k < p->size(); ++k) {
        double c = (*p)[k] / static_cast<double>(k + 1);
        if (c != 0.0) out = add(out, mul(constant(c), pow(t, static_cast<double>(k + 1))));
      }
      return out;
    }
    switch (e.op()) {
      case Op::neg: {
        auto g = integrate(e.arg());
        if (!g) return std::nullopt;
        return neg(*g);
      }
      case Op::add:
      case Op::sub: {
        auto l = integrate(e.lhs());
        auto r = integrate(e.rhs());
        if (!l || !r) return std::nullopt;
        return e.op() == Op::add ? add(*l, *r) : sub(*l, *r);
      }
      case Op::mul: {
        if (!e.lhs().depends_on(var_)) {
          auto g = integrate(e.rhs());
          if (!g) return std::nullopt;
          return mul(e.lhs(), *g);
        }
        if (!e.rhs().depends_on(var_)) {
          auto g = integrate(e.lhs());
          if (!g) return std::nullopt;
          return mul(e.rhs(), *g);
        }
        return std::nullopt;
      }
      case Op::div: {
        if (!e.rhs().depends_on(var_)) {
          auto g = integrate(e.lhs());
          if (!g) return std::nullopt;
          return div(*g, e.rhs());
        }
        if (!e.lhs().depends_on(var_)) {
          if (auto g = power_of_linear(e.rhs(), -1.0)) return mul(e.lhs(), *g);
        }
        return std::nullopt;
      }
      case Op::pow:
        return power_of_linear(e.lhs(), e.rhs().eval(Point4{}));
      case Op::sin:
      case Op::cos:
      case Op::exp:
      case Op::sqrt: {
        auto l = linear(e.arg());
        if (!l || l->a == 0.0) return std::nullopt;
        const Expr& u = e.arg();
        switch (e.op()) {
          case Op::sin:
            return div(neg(apply(Op::cos, u)), constant(l->a));
          case Op::cos:
            return div(apply(Op::sin, u), constant(l->a));
          case Op::exp:
            return div(e, constant(l->a));
          default:
            return mul(constant(2.0 / (3.0 * l->a)), pow(u, 1.5));
        }
      }
      default:
        return std::nullopt;
    }
  }

 private:
  bool constant_value(const Expr& e, double& out) const {
    try {
      out = e.eval(Point4{});
      return true;
    } catch (const EvalError&) {
      return false;
    }
  }

  /// Antiderivative of u^n where u is linear in t.
  std::optional<Expr> power_of_linear(const Expr& u, double n) const {
    using namespace build;
    auto l = linear(u);
    if (!l || l->a == 0.0) return std::nullopt;
    if (n != -1.0) return div(pow(u, n + 1.0), constant((n + 1.0) * l->a));
    // ln|u| / a, valid only if u keeps one sign on the closed interval
    double ulo = l->a * interval_.lo + l->b;
    double uhi = l->a * interval_.hi + l->b;
    if (ulo > 0.0 && uhi > 0.0) return div(apply(Op::ln, u), constant(l->a));
    if (ulo < 0.0 && uhi < 0.0) return div(apply(Op::ln, neg(u)), constant(l->a));
    return std::nullopt;
  }

  int var_;
  Interval interval_;
};

}  // namespace

std::optional<Expr> symbolic_antiderivative(const UnivariateFn& f, double base) {
  Integrator integ(f.var(), f.interval());
  auto g = integ.integrate(f.expr());
  if (!g) return std::nullopt;
  try {
    double g0 = g->eval(embed(f.var(), base));
    return build::sub(*g, build::constant(g0));
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

Antiderivative Antiderivative::of(const UnivariateFn& f, std::optional<double> base) {
  Antiderivative F;
  F.f_ = f;
  F.base_ = base.value_or(f.interval().mid());
  if (!f.interval().contains(F.base_)) {
    throw Error("antiderivative base " + format_number(F.base_) + " outside the interval of x" +
                std::to_string(f.var()));
  }
  F.closed_form_ = symbolic_antiderivative(f, F.base_);
  return F;
}

double Antiderivative::operator()(double t) const {
  if (closed_form_) return closed_form_->eval(embed(f_.var(), t));
  if (t == base_) return 0.0;
  return integrate_or_throw([this](double s) { return f_(s); }, base_, t);
}

std::string Antiderivative::describe() const {
  if (closed_form_) return closed_form_->str();
  return "quadrature-backed: integral of (" + f_.expr().str() + ") d x" + std::to_string(f_.var()) + " from " +
         format_number(base_);
}

}  // namespace p4d
