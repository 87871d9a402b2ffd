#pragma once

#include <functional>

#include "poisson4d/expr.hpp"

namespace p4d {

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double error_estimate)
      : Error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = true;
};

/// Adaptive Simpson with Richardson correction. The integral from a to b is
/// accepted panel by panel once |S_left + S_right - S_whole| <= 15 * eps,
/// halving eps at each bisection. Panels that hit max_depth are accepted with
/// converged = false. b < a integrates backwards.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol = 1e-12, int max_depth = 40);

/// Same, but throws QuadratureError when the accumulated error estimate
/// exceeds abs_tol.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, int max_depth = 40);

}  // namespace p4d
