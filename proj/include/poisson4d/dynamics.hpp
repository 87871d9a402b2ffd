#pragma once

// Fixed-step RK4 integration of dx/dt = J grad H and of the reparametrized
// field dx/dtau = mu J grad H, with first-integral monitoring.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "poisson4d/casimir.hpp"
#include "poisson4d/reduce3d.hpp"
#include "poisson4d/structure.hpp"

namespace p4d {

struct PoissonSystem {
  std::function<Mat4(const Point4&)> matrix;  // no domain check
  Expr hamiltonian;
  std::array<Expr, 4> grad_h;
  std::optional<CasimirPair> casimirs;
  BoxDomain domain;

  /// Casimirs from casimirs_for(f) unless with_casimirs is false.
  static PoissonSystem from_family(const FamilyStructure& f, const Expr& h, bool with_casimirs = true);
  /// Embeds the 3D matrix in the upper 3x3 block; x4 stays at the leaf
  /// value, inside the interval [leaf - 0.5, leaf + 0.5].
  static PoissonSystem from_three_d(const ThreeDStructure& s, const Expr& h);

  Vec4 grad(const Point4& x) const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Point4> x;
  std::vector<double> h, c1, c2;  // c1, c2 empty without Casimirs
  bool truncated = false;         // stopped at the domain boundary
  std::string stop_reason;
  double max_orthogonality = 0.0;  // max |grad H . J grad H| / |grad H|^2
  double max_casimir_rate = 0.0;   // max |grad C_k . xdot| / max(1, |grad C_k| |xdot|)
  double drift_h = 0.0, drift_c1 = 0.0, drift_c2 = 0.0;

  std::size_t steps() const noexcept { return t.empty() ? 0 : t.size() - 1; }
  double t_end() const noexcept { return t.empty() ? 0.0 : t.back(); }
  /// max(drift_h, drift_c1, drift_c2).
  double max_drift() const noexcept;
};

/// drift(f) = max_t |f(x(t)) - f(x0)| / max(1, |f(x0)|).
double drift(const std::vector<double>& values);

/// Classical RK4 with fixed step dt. A step whose end point leaves the open
/// box is discarded and the trajectory marked truncated. Throws on x0
/// outside the domain, dt <= 0, or a non-finite state.
Trajectory integrate(const PoissonSystem& sys, const Point4& x0, double t_end, double dt);

/// Same scheme on mu J grad H; throws if mu vanishes or changes sign on 200
/// Halton points of the domain.
Trajectory integrate_reparametrized(const PoissonSystem& sys, std::function<double(const Point4&)> mu,
                                    const Point4& x0, double tau_end, double dtau);

}  // namespace p4d
