#include <doctest.h>

#include <cmath>

#include "poisson4d/darboux.hpp"
#include "poisson4d/halton.hpp"
#include "support.hpp"

using namespace p4d;

namespace {

const Point4 kP{0.5, 2.5, 4.5, 6.5};

CoordMap doubling() {
  CoordMap m;
  m.description = {"2*x1", "2*x2", "2*x3", "2*x4"};
  m.forward = [](const Point4& x) { return Vec4{2 * x[0], 2 * x[1], 2 * x[2], 2 * x[3]}; };
  m.jacobian = [](const Point4&) { return 2.0 * identity_mat4(); };
  return m;
}

}  // namespace

TEST_CASE("y map") {
  FamilyStructure f = FamilyStructure::parse(SigmaSet(1, 1, 1, 1, 1, 1), "1", {"x1", "1", "1", "1"},
                                             {"x1", "10 + x2", "20 + x3", "30 + x4"},
                                             BoxDomain::make({1, 0, 0, 0}, {3, 1, 1, 1}));
  CoordMap y = y_map(f);
  Point4 x{2.5, 0.25, 0.5, 0.75};
  Vec4 v = y.forward(x);
  CHECK(v[0] == doctest::Approx(std::log(1.25)).epsilon(1e-13));
  CHECK(v[1] == doctest::Approx(-0.25).epsilon(1e-14));
  Mat4 d = y.jacobian(x);
  CHECK(d[0][0] == doctest::Approx(0.4));
  CHECK(d[1][1] == 1.0);
  CHECK(d[0][1] == 0.0);

  FamilyStructure bad = f;
  bad.domain = BoxDomain::make({-1, 0, 0, 0}, {1, 1, 1, 1});
  bad.psi[0] = UnivariateFn(parse("x1"), 1, bad.domain.axis(1));
  CHECK_THROWS_AS(y_map(bad), Error);
}

TEST_CASE("pushforward") {
  Mat4 j = evaluate_matrix(test::sstar(), kP);
  Mat4 t = pushforward_matrix(constant_field(j), doubling(), kP);
  CHECK(max_abs(t - 4.0 * j) == 0.0);
  CHECK(max_abs(pushforward_matrix(constant_field(j), CoordMap::identity(), kP) - j) == 0.0);

  CoordMap flat = doubling();
  flat.jacobian = [](const Point4&) {
    Mat4 m = identity_mat4();
    m[3][3] = 0.0;
    return m;
  };
  CHECK_THROWS_AS(pushforward_matrix(constant_field(j), flat, kP), Error);

  CoordMap c = compose(doubling(), doubling());
  CHECK(c.jacobian(kP)[2][2] == 4.0);
}

TEST_CASE("S* pipeline") {
  FamilyStructure f = test::sstar();
  DarbouxPipeline p = build_pipeline(f);
  CHECK(p.retained == std::array<int, 2>{1, 2});
  CHECK(std::fabs(p.eta_pp(kP) - 4.0) <= 1e-12);
  REQUIRE(p.closed_form_expression.has_value());
  CHECK(p.closed_form_expression->eval(kP) == doctest::Approx(4.0));
  PipelineReport r = verify_pipeline(p, 200);
  CHECK(r.max_deviation <= 1e-9);
  CHECK(r.max_frozen_rows <= 1e-9);
  CHECK(r.max_closed_form_gap <= 1e-9);
  CHECK(r.eta_pp_sign_constant);
  CHECK(r.min_abs_eta_pp > 0.0);
}

TEST_CASE("IIA.1 pipeline: eta'' is y4 - y3") {
  FamilyStructure f = test::gallery_structure("iia1");
  DarbouxPipeline p = build_pipeline(f);
  CHECK(p.retained == std::array<int, 2>{1, 2});
  for (const Point4& x : halton_points(f.domain, 20)) {
    // psi = 1, phi_i = x_i, so y_i - x_i is a constant shift.
    CHECK(p.eta_pp(x) == doctest::Approx(x[3] - x[2]).epsilon(1e-10));
  }
  CHECK(verify_pipeline(p, 200).max_deviation <= 1e-9);
}

TEST_CASE("identity pipeline") {
  DarbouxPipeline p = DarbouxPipeline::from_maps(constant_field(darboux_canonical()), CoordMap::identity(),
                                                 CoordMap::identity(), BoxDomain::make({0, 0, 0, 0}, {1, 1, 1, 1}));
  PipelineReport r = verify_pipeline(p, 50);
  CHECK(r.max_deviation == 0.0);
  CHECK(r.min_abs_eta_pp == 1.0);
  CHECK(r.max_abs_eta_pp == 1.0);
}

TEST_CASE("a broken pipeline is detected") {
  FamilyStructure f = test::sstar();
  DarbouxPipeline good = build_pipeline(f);
  DarbouxPipeline bad = DarbouxPipeline::from_maps(family_field(f), good.stage1, CoordMap::identity(), f.domain);
  CHECK(verify_pipeline(bad, 50).max_deviation > 1e-3);
}

TEST_CASE("property: pipelines for random structures") {
  test::Rng rng(51);
  for (int k = 0; k < 30; ++k) {
    FamilyStructure f = test::random_structure(rng, k);
    DarbouxPipeline p = build_pipeline(f);
    PipelineReport r = verify_pipeline(p, 50, static_cast<std::uint64_t>(k));
    INFO(p.label.str());
    CHECK(r.max_deviation <= 1e-8 * std::max(1.0, r.max_abs_eta_pp));
    CHECK(r.max_closed_form_gap <= 1e-8);
    CHECK(r.eta_pp_sign_constant);
    PipelineReport s = verify_pipeline(p, 50, static_cast<std::uint64_t>(k), Exec::serial);
    CHECK(s.max_deviation == r.max_deviation);
  }
}

TEST_CASE("time reparametrization") {
  FamilyStructure f = test::sstar();
  Expr h = parse("x1 + x2 + x3 + x4");
  MatrixField m = family_field(f);
  auto one = reparametrized_vector_field(m, h, [](const Point4&) { return 1.0; }, f.domain);
  Vec4 v = one(kP);
  CHECK(v[0] == doctest::Approx(2.0));
  auto two = reparametrized_vector_field(m, h, [](const Point4&) { return 2.0; }, f.domain);
  CHECK(two(kP)[0] == doctest::Approx(4.0));
  CHECK_THROWS_AS(reparametrized_vector_field(m, h, [](const Point4& x) { return x[0] - 0.5; }, f.domain), Error);

  std::array<Expr, 4> g = gradient_exprs(parse("x1*x2 + x3^2"));
  CHECK(g[0].eval(kP) == 2.5);
  CHECK(g[2].eval(kP) == 9.0);
  CHECK(g[3].eval(kP) == 0.0);
}
