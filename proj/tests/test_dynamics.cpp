#include <doctest.h>

#include <cmath>

#include "poisson4d/darboux.hpp"
#include "poisson4d/dynamics.hpp"
#include "poisson4d/gallery.hpp"
#include "poisson4d/reduce3d.hpp"
#include "support.hpp"

using namespace p4d;

namespace {

const Point4 kP{0.5, 2.5, 4.5, 6.5};

}  // namespace

TEST_CASE("constant Hamiltonian leaves every point fixed") {
  PoissonSystem sys = PoissonSystem::from_family(test::sstar(), parse("3"));
  Trajectory t = integrate(sys, kP, 0.5, 0.01);
  CHECK(t.steps() == 50);
  CHECK(t.x.back() == kP);
  CHECK(t.max_drift() == 0.0);
}

TEST_CASE("first velocity of S*") {
  PoissonSystem sys = PoissonSystem::from_family(test::sstar(), parse("x1 + x2 + x3 + x4"));
  Vec4 v = sys.matrix(kP) * sys.grad(kP);
  CHECK(v[0] == 2.0);
  CHECK(v[1] == -4.0 + 36.0 - 40.0);
  Trajectory t = integrate(sys, kP, 1e-5, 1e-5);
  CHECK((t.x[1][0] - kP[0]) / 1e-5 == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("a Casimir as Hamiltonian is stationary") {
  PoissonSystem sys = PoissonSystem::from_family(test::sstar(), parse("30*x1 + 15*x2 + 10*x3 + 6*x4"));
  Trajectory t = integrate(sys, kP, 1.0, 0.01);
  for (int i = 0; i < 4; ++i)
    CHECK(std::fabs(t.x.back()[static_cast<std::size_t>(i)] - kP[static_cast<std::size_t>(i)]) <= 1e-12);
}

TEST_CASE("S* orbit conserves H and both Casimirs") {
  FamilyStructure f = test::gallery_structure("sstar-orbit");
  PoissonSystem sys = PoissonSystem::from_family(f, *f.hamiltonian);
  Trajectory t = integrate(sys, kP, 2.0, 1e-3);
  CHECK_FALSE(t.truncated);
  CHECK(t.steps() == 2000);
  CHECK(t.drift_h <= 1e-12);
  CHECK(t.drift_c1 <= 1e-12);
  CHECK(t.drift_c2 <= 1e-8);
  CHECK(t.max_orthogonality <= 1e-12);
  CHECK(t.max_casimir_rate <= 1e-10);

  // Fourth order: halving dt shrinks the C2 drift by about 16.
  Trajectory c = integrate(sys, kP, 2.0, 2e-3);
  CHECK(c.drift_c2 / t.drift_c2 > 10.0);
}

TEST_CASE("leaving the box truncates the trajectory") {
  FamilyStructure f = test::sstar();
  PoissonSystem sys = PoissonSystem::from_family(f, *f.hamiltonian);
  Trajectory t = integrate(sys, kP, 1.0, 1e-3);
  CHECK(t.truncated);
  CHECK(t.t_end() < 1.0);
  CHECK_FALSE(t.stop_reason.empty());
  for (const Point4& x : t.x) CHECK(f.domain.contains(x));
  CHECK_THROWS_AS(integrate(sys, {2, 2.5, 4.5, 6.5}, 1.0, 1e-3), Error);
  CHECK_THROWS_AS(integrate(sys, kP, 1.0, 0.0), Error);
}

TEST_CASE("reparametrized integration") {
  FamilyStructure f = test::gallery_structure("sstar-orbit");
  PoissonSystem sys = PoissonSystem::from_family(f, *f.hamiltonian);
  Trajectory a = integrate(sys, kP, 0.5, 1e-3);
  Trajectory b = integrate_reparametrized(sys, [](const Point4&) { return 1.0; }, kP, 0.5, 1e-3);
  CHECK(a.x == b.x);

  Trajectory c = integrate_reparametrized(sys, [](const Point4&) { return 2.0; }, kP, 0.25, 0.5e-3);
  REQUIRE(c.x.size() == a.x.size());
  for (int i = 0; i < 4; ++i)
    CHECK(std::fabs(c.x.back()[static_cast<std::size_t>(i)] - a.x.back()[static_cast<std::size_t>(i)]) <= 1e-12);

  CHECK_THROWS_AS(integrate_reparametrized(sys, [](const Point4& x) { return x[0] - 0.5; }, kP, 0.1, 1e-3), Error);
}

TEST_CASE("pipeline time factor keeps the Casimir coordinates frozen") {
  FamilyStructure f = test::gallery_structure("sstar-orbit");
  PoissonSystem sys = PoissonSystem::from_family(f, *f.hamiltonian);
  DarbouxPipeline p = build_pipeline(f);
  Trajectory t =
      integrate_reparametrized(sys, [&p](const Point4& x) { return 1.0 / p.eta_pp(x); }, kP, 0.2, 1e-4);
  Vec4 z0 = p.stage2.forward(kP);
  for (const Point4& x : t.x) {
    Vec4 z = p.stage2.forward(x);
    CHECK(std::fabs(z[2] - z0[2]) <= 1e-9 * std::max(1.0, std::fabs(z0[2])));
    CHECK(std::fabs(z[3] - z0[3]) <= 1e-9 * std::max(1.0, std::fabs(z0[3])));
  }
}

TEST_CASE("three-dimensional systems") {
  const StructureDefinition& d = gallery_entry("euler-top-3d");
  ThreeDStructure s = leaf_reduce(d.build(), *d.leaf);
  PoissonSystem sys = PoissonSystem::from_three_d(s, parse(d.hamiltonian));
  Point4 x0{0.3, 0.4, 0.5, *d.leaf};
  Trajectory t = integrate(sys, x0, 5.0, 1e-3);
  CHECK_FALSE(t.truncated);
  CHECK(t.drift_h <= 1e-9);
  double r0 = x0[0] * x0[0] + x0[1] * x0[1] + x0[2] * x0[2];
  const Point4& x = t.x.back();
  CHECK(std::fabs(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - r0) <= 1e-9);
  CHECK(x[3] == *d.leaf);
}

TEST_CASE("drift") {
  CHECK(drift({}) == 0.0);
  CHECK(drift({2.0, 2.0, 3.0}) == 0.5);
  CHECK(drift({0.1, 0.6}) == 0.5);
}
