#include "poisson4d/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "poisson4d/darboux.hpp"
#include "poisson4d/halton.hpp"

namespace p4d {

PoissonSystem PoissonSystem::from_family(const FamilyStructure& f, const Expr& h, bool with_casimirs) {
  PoissonSystem s;
  s.matrix = family_field(f).value;
  s.hamiltonian = h;
  s.grad_h = gradient_exprs(h);
  if (with_casimirs) s.casimirs = casimirs_for(f);
  s.domain = f.domain;
  return s;
}

PoissonSystem PoissonSystem::from_three_d(const ThreeDStructure& t, const Expr& h) {
  PoissonSystem s;
  ExprMatrix3 m = t.matrix();
  s.matrix = [m](const Point4& x) {
    Mat3 j = m.eval({x[0], x[1], x[2]});
    Mat4 out = zero_mat4();
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 3; ++k) out[i][k] = j[i][k];
    return out;
  };
  s.hamiltonian = h;
  s.grad_h = gradient_exprs(h);
  s.domain = BoxDomain::make({t.box[0].lo, t.box[1].lo, t.box[2].lo, t.leaf - 0.5},
                             {t.box[0].hi, t.box[1].hi, t.box[2].hi, t.leaf + 0.5});
  return s;
}

Vec4 PoissonSystem::grad(const Point4& x) const {
  return {grad_h[0].eval(x), grad_h[1].eval(x), grad_h[2].eval(x), grad_h[3].eval(x)};
}

double Trajectory::max_drift() const noexcept { return std::max({drift_h, drift_c1, drift_c2}); }

double drift(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double f0 = values.front(), m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v - f0));
  return m / std::max(1.0, std::fabs(f0));
}

namespace {

using Field = std::function<Vec4(const Point4&)>;

Point4 axpy(const Point4& x, double a, const Vec4& k) {
  return {x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2], x[3] + a * k[3]};
}

void record(const PoissonSystem& sys, const Field& field, Trajectory& tr, double t, const Point4& x) {
  tr.t.push_back(t);
  tr.x.push_back(x);
  tr.h.push_back(sys.hamiltonian.eval(x));
  Vec4 g = sys.grad(x);
  Vec4 jg = sys.matrix(x) * g;
  double g2 = dot(g, g);
  double orth = g2 == 0.0 ? 0.0 : std::fabs(dot(g, jg)) / g2;
  tr.max_orthogonality = std::max(tr.max_orthogonality, orth);
  if (sys.casimirs) {
    CasimirValues c = sys.casimirs->evaluate(x);
    tr.c1.push_back(c.c1);
    tr.c2.push_back(c.c2);
    Vec4 v = field(x);
    for (const Vec4* gc : {&c.grad1_x, &c.grad2_x}) {
      double rate = std::fabs(dot(*gc, v)) / std::max(1.0, norm2(*gc) * norm2(v));
      tr.max_casimir_rate = std::max(tr.max_casimir_rate, rate);
    }
  }
}

Trajectory run(const PoissonSystem& sys, const Field& field, const Point4& x0, double t_end, double dt) {
  if (!(dt > 0.0)) throw Error("step size must be positive");
  if (!sys.domain.contains(x0)) throw Error("initial point " + format_point(x0) + " outside the domain");
  Trajectory tr;
  Point4 x = x0;
  record(sys, field, tr, 0.0, x);
  auto n = static_cast<long>(std::llround(t_end / dt));
  for (long step = 1; step <= n; ++step) {
    Vec4 k1 = field(x);
    Vec4 k2 = field(axpy(x, 0.5 * dt, k1));
    Vec4 k3 = field(axpy(x, 0.5 * dt, k2));
    Vec4 k4 = field(axpy(x, dt, k3));
    Point4 next;
    for (std::size_t i = 0; i < 4; ++i) next[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (double v : next) {
      if (!std::isfinite(v)) throw Error("non-finite state after step " + std::to_string(step));
    }
    if (!sys.domain.contains(next)) {
      tr.truncated = true;
      tr.stop_reason = "left the domain at step " + std::to_string(step) + " near " + format_point(next);
      break;
    }
    x = next;
    record(sys, field, tr, static_cast<double>(step) * dt, x);
  }
  if (!tr.truncated) tr.stop_reason = "reached t_end";
  tr.drift_h = drift(tr.h);
  tr.drift_c1 = drift(tr.c1);
  tr.drift_c2 = drift(tr.c2);
  return tr;
}

}  // namespace

Trajectory integrate(const PoissonSystem& sys, const Point4& x0, double t_end, double dt) {
  Field f = [&sys](const Point4& x) { return sys.matrix(x) * sys.grad(x); };
  return run(sys, f, x0, t_end, dt);
}

Trajectory integrate_reparametrized(const PoissonSystem& sys, std::function<double(const Point4&)> mu,
                                    const Point4& x0, double tau_end, double dtau) {
  MatrixField m{sys.matrix, nullptr};
  Field f = reparametrized_vector_field(m, sys.hamiltonian, std::move(mu), sys.domain);
  return run(sys, f, x0, tau_end, dtau);
}

}  // namespace p4d
