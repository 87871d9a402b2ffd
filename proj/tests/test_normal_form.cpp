#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "poisson4d/halton.hpp"
#include "poisson4d/normal_form.hpp"
#include "support.hpp"

using namespace p4d;

namespace {

bool all_positive(const SigmaSet& s) {
  for (double v : s.values)
    if (!(v > 0.0)) return false;
  return true;
}

double matrix_gap(const FamilyStructure& a, const FamilyStructure& b, int n) {
  double gap = 0.0;
  for (const Point4& x : halton_points(a.domain, static_cast<std::size_t>(n))) {
    gap = std::max(gap, max_abs(evaluate_matrix(a, x) - evaluate_matrix(b, x)));
  }
  return gap;
}

}  // namespace

TEST_CASE("normalization examples") {
  FamilyStructure s = test::sstar();
  FamilyStructure n = sigma_positive_normalize(s);
  CHECK(sigma_positive_flips(s.sigma).branch == "1");
  CHECK(n.sigma.values == s.sigma.values);
  CHECK(matrix_gap(s, n, 20) == 0.0);

  FamilyStructure neg = FamilyStructure::parse(SigmaSet(-1, -1, -1, -1, -1, -1), "1", {"1", "1", "1", "1"},
                                               {"x1", "x2", "x3", "x4"}, BoxDomain::make({-1, 0, 1, 2}, {1, 2, 3, 4}));
  FamilyStructure nn = sigma_positive_normalize(neg);
  CHECK(sigma_positive_flips(neg.sigma).branch == "2");
  CHECK(all_positive(nn.sigma));
  CHECK(evaluate_matrix(neg, {0, 1, 2, 3})[0][1] == -1.0);
  CHECK(evaluate_matrix(nn, {0, 1, 2, 3})[0][1] == -1.0);
  CHECK(nn.phi[0](0.5) == -0.5);

  FamilyStructure m311 = test::sstar();
  m311.sigma = SigmaSet(-2, 3, 5, 6, 10, -15);
  SignFlips f = sigma_positive_flips(m311.sigma);
  CHECK(f.branch == "3.1.1");
  CHECK(f.flip_phi);
  CHECK(f.flip_psi == std::array<bool, 4>{false, false, true, true});
  CHECK(matrix_gap(m311, sigma_positive_normalize(m311), 20) == 0.0);

  CHECK_THROWS_AS(sigma_positive_flips(SigmaSet(1, 1, 0, 1, 0, 0)), Error);
}

TEST_CASE("each case-table branch") {
  struct Row {
    SigmaSet s;
    const char* branch;
  };
  const Row rows[] = {
      {SigmaSet(1, -1, 1, 1, -1, 1), "3.1.2"},
      {SigmaSet(1, 1, -1, -1, 1, 1), "3.1.3"},
      {SigmaSet(1, -1, -1, -1, -1, 1), "3.2 (step 2 of 3.1.1)"},
      {SigmaSet(-1, 1, -1, -1, 1, -1), "3.2 (step 2 of 3.1.2)"},
      {SigmaSet(-1, -1, 1, 1, -1, -1), "3.2 (step 2 of 3.1.3)"},
      {SigmaSet(-1, -1, -1, 1, 1, 1), "4.1"},
      {SigmaSet(-1, 1, 1, -1, -1, 1), "4.2"},
  };
  for (const Row& r : rows) {
    CHECK(sigma_positive_flips(r.s).branch == std::string(r.branch));
  }
  CHECK(sigma_positive_flips(SigmaSet(-1, 1, -1, 1, -1, 1)).branch == "4.3");
  CHECK(sigma_positive_flips(SigmaSet(-1, -1, 1, -1, 1, 1)).branch == "4.4");
  CHECK(sigma_positive_flips(SigmaSet(1, 1, -1, 1, -1, -1)).branch.find("relabelled") != std::string::npos);
}

TEST_CASE("property: normalization preserves the matrix for all 32 sign patterns") {
  test::Rng rng(31);
  int tested = 0;
  for (int k = 0; k < 50; ++k) {
    FamilyStructure f = test::random_case1(rng, true);
    FamilyStructure n = sigma_positive_normalize(f);
    CHECK(all_positive(n.sigma));
    CHECK(matrix_gap(f, n, 20) <= 1e-13);
    // Idempotence.
    FamilyStructure nn = sigma_positive_normalize(n);
    CHECK(nn.sigma.values == n.sigma.values);
    CHECK(sigma_positive_flips(n.sigma).branch == "1");
    ++tested;
  }
  CHECK(tested == 50);
}

TEST_CASE("factor examples") {
  SigmaFactors a = factor_sigma(SigmaSet(2, 3, 5, 6, 10, 15));
  const std::array<double, 4> want{1, 2, 3, 5};
  for (int i = 1; i <= 4; ++i) CHECK(a[i] == doctest::Approx(want[static_cast<std::size_t>(i - 1)]).epsilon(1e-15));
  SigmaFactors b = factor_sigma(SigmaSet(1, 1, 1, 1, 1, 1));
  for (double v : b.values) CHECK(v == 1.0);
  SigmaFactors c = factor_sigma(SigmaSet(4, 4, 4, 4, 4, 4));
  for (double v : c.values) CHECK(v == 2.0);
  CHECK_THROWS_AS(factor_sigma(SigmaSet(-2, 3, 5, 6, 10, -15)), Error);
  CHECK_THROWS_AS(factor_sigma(SigmaSet(1, 1, 1, 1, 2, 1)), Error);
}

TEST_CASE("property: factor round trip and uniqueness") {
  test::Rng rng(32);
  for (int k = 0; k < 200; ++k) {
    std::array<double, 4> s{};
    for (double& v : s) v = test::uniform(rng, 0.5, 5.0);
    SigmaSet sig = SigmaSet::from_factors(s);
    SigmaFactors f = factor_sigma(sig);
    for (int p = 0; p < 6; ++p) {
      auto [i, j] = pair_at(p);
      CHECK(std::fabs(f[i] * f[j] - sig(i, j)) <= 1e-12 * sig(i, j));
    }
    // Perturb and project: least squares on log s_i + log s_j = log s_ij
    // from a perturbed start reproduces the same factors.
    Eigen::Matrix<double, 6, 4> a = Eigen::Matrix<double, 6, 4>::Zero();
    Eigen::Matrix<double, 6, 1> rhs;
    for (int p = 0; p < 6; ++p) {
      auto [i, j] = pair_at(p);
      a(p, i - 1) = 1.0;
      a(p, j - 1) = 1.0;
      rhs(p) = std::log(sig(i, j) * (1.0 + 1e-3 * test::uniform(rng, -1, 1)));
    }
    Eigen::Vector4d start = a.colPivHouseholderQr().solve(rhs);
    for (int p = 0; p < 6; ++p) {
      auto [i, j] = pair_at(p);
      rhs(p) = std::log(sig(i, j));
    }
    Eigen::Vector4d corr = a.colPivHouseholderQr().solve(rhs - a * start);
    Eigen::Vector4d sol = start + corr;
    for (int i = 1; i <= 4; ++i) CHECK(std::exp(sol(i - 1)) == doctest::Approx(f[i]).epsilon(1e-10));
  }
}
