#include "poisson4d/quadrature.hpp"

#include <cmath>

namespace p4d {

namespace {

struct Panel {
  double a, fa, m, fm, b, fb, whole;
};

class Simpson {
 public:
  Simpson(const std::function<double(double)>& f, int max_depth) : f_(f), max_depth_(max_depth) {}

  double eval(double t) {
    ++result.evaluations;
    return f_(t);
  }

  double recurse(const Panel& p, double eps, int depth) {
    double lm = 0.5 * (p.a + p.m);
    double rm = 0.5 * (p.m + p.b);
    double flm = eval(lm);
    double frm = eval(rm);
    double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    double delta = left + right - p.whole;
    bool exhausted = depth >= max_depth_ || lm == p.a || rm == p.b;
    if (std::fabs(delta) <= 15.0 * eps || exhausted) {
      if (std::fabs(delta) > 15.0 * eps) result.converged = false;
      result.error_estimate += std::fabs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse({p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * eps, depth + 1) +
           recurse({p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * eps, depth + 1);
  }

  QuadratureResult result;

 private:
  const std::function<double(double)>& f_;
  int max_depth_;
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth) {
  if (a == b) return {};
  Simpson s(f, max_depth);
  double fa = s.eval(a);
  double fb = s.eval(b);
  double m = 0.5 * (a + b);
  double fm = s.eval(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double value = s.recurse({a, fa, m, fm, b, fb, whole}, abs_tol, 0);
  QuadratureResult r = s.result;
  r.value = value;
  if (!std::isfinite(value)) r.converged = false;
  return r;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          int max_depth) {
  QuadratureResult r = adaptive_simpson(f, a, b, abs_tol, max_depth);
  if (!std::isfinite(r.value) || (!r.converged && r.error_estimate > abs_tol)) {
    throw QuadratureError("adaptive Simpson failed to converge on [" + format_number(a) + ", " +
                              format_number(b) + "], error estimate " + format_number(r.error_estimate),
                          r.error_estimate);
  }
  return r.value;
}

}  // namespace p4d
