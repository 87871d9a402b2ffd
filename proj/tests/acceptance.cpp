// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every threshold used below is pinned in this file.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "poisson4d/casimir.hpp"
#include "poisson4d/darboux.hpp"
#include "poisson4d/dynamics.hpp"
#include "poisson4d/gallery.hpp"
#include "poisson4d/halton.hpp"
#include "poisson4d/normal_form.hpp"
#include "poisson4d/reduce3d.hpp"
#include "support.hpp"

using namespace p4d;

namespace {

// AC1
constexpr double kJacobiTol = 1e-10;
constexpr int kJacobiSamples = 200;
constexpr int kRandomStructures = 50;
constexpr double kAc1Seconds = 30.0;
// AC2
constexpr double kPerturbation = 0.05;
constexpr double kBrokenJacobiMin = 1e-4;
// AC3
constexpr double kPfaffianRel = 1e-12;
// AC4
constexpr double kNormalizeTol = 1e-13;
constexpr int kNormalizePoints = 20;
constexpr int kSignPatterns = 50;
constexpr double kFactorRel = 1e-12;
// AC5
constexpr double kCasimirTol = 1e-9;
constexpr double kIndependence = 1e-6;
constexpr int kCasimirSamples = 200;
// AC6
constexpr double kPipelineTol = 1e-8;
constexpr int kPipelineSamples = 200;
constexpr double kSstarEtaPP = 4.0;
constexpr double kSstarEtaPPTol = 1e-12;
// AC7
constexpr double kOrthogonalityRel = 1e-12;
constexpr double kCasimirRate = 1e-10;
constexpr double kDriftTol = 1e-8;
constexpr double kTEnd = 1.0;
constexpr double kDt = 1e-3;
constexpr double kConvergenceMin = 8.0;
// AC8
constexpr double kJacobi3Tol = 1e-10;
constexpr int kJacobi3Samples = 100;
// AC9
constexpr double kRegressionTol = 1e-12;

const Point4 kP{0.5, 2.5, 4.5, 6.5};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<FamilyStructure> family_gallery() {
  std::vector<FamilyStructure> out;
  for (const StructureDefinition& d : gallery())
    if (!d.leaf_limit) out.push_back(d.build());
  return out;
}

std::vector<FamilyStructure> random_structures(int n, std::uint64_t seed) {
  test::Rng rng(seed);
  std::vector<FamilyStructure> out;
  for (int k = 0; k < n; ++k) out.push_back(test::random_structure(rng, k));
  return out;
}

// Two random structures for each reachable label: Case I, the eight generic
// patterns, and nongeneric subsets with two and one coupling left.
std::vector<FamilyStructure> label_cover(std::uint64_t seed) {
  test::Rng rng(seed);
  std::vector<FamilyStructure> out;
  for (int rep = 0; rep < 2; ++rep) {
    out.push_back(test::random_case1(rng, true));
    for (int pattern = 0; pattern < 8; ++pattern) {
      std::array<int, 3> pairs = pattern < 4 ? iia_allowed_pairs(pattern + 1) : iib_allowed_pairs(pattern - 3);
      for (int keep = 3; keep >= 1; --keep) {
        SigmaSet s;
        for (int r = 0; r < keep; ++r) {
          double v = test::uniform(rng, 0.5, 5.0) * (test::uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0);
          s.values[static_cast<std::size_t>(pairs[static_cast<std::size_t>((r + rep) % 3)])] = v;
        }
        out.push_back(test::random_with_sigma(rng, s));
      }
    }
  }
  return out;
}

Outcome ac1() {
  auto start = std::chrono::steady_clock::now();
  std::vector<FamilyStructure> all = family_gallery();
  for (FamilyStructure& f : random_structures(kRandomStructures, 101)) all.push_back(std::move(f));
  double worst = 0.0;
  for (const FamilyStructure& f : all) {
    auto pts = halton_points(f.domain, kJacobiSamples);
    worst = std::max(worst, max_jacobi_residual(family_field(f), pts));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.pass = worst <= kJacobiTol && secs < kAc1Seconds;
  o.detail = std::to_string(all.size()) + " structures, max residual " + fmt("%.3e", worst) + " (tol " +
             fmt("%.0e", kJacobiTol) + "), " + fmt("%.2f", secs) + " s";
  return o;
}

Outcome ac2() {
  Outcome o;
  double weakest = INFINITY;
  int perturbed = 0;
  std::string names;
  for (const StructureDefinition& d : gallery()) {
    if (d.leaf_limit) continue;
    FamilyStructure f = d.build();
    if (classify(f.sigma).family != CaseFamily::I) continue;
    // Constant phi and eta make every coupling set Poisson (separable case).
    if (is_separable(f).separable) continue;
    names += (names.empty() ? "" : ",") + d.name;
    auto pts = halton_points(f.domain, kJacobiSamples);
    for (int p = 0; p < 6; ++p) {
      FamilyStructure g = f;
      g.sigma.values[static_cast<std::size_t>(p)] *= 1.0 + kPerturbation;
      weakest = std::min(weakest, max_jacobi_residual(family_field(g), pts));
      ++perturbed;
    }
  }
  o.pass = perturbed > 0 && weakest > kBrokenJacobiMin;
  o.detail = std::to_string(perturbed) + " single-coupling perturbations of " + names + ", min residual " +
             fmt("%.3e", weakest) + " (need > " + fmt("%.0e", kBrokenJacobiMin) + ")";
  return o;
}

Outcome ac3() {
  std::vector<FamilyStructure> all = family_gallery();
  for (FamilyStructure& f : random_structures(kRandomStructures, 103)) all.push_back(std::move(f));
  double worst_pf = 0.0;
  int bad_rank = 0, points = 0;
  for (const FamilyStructure& f : all) {
    for (const Point4& x : halton_points(f.domain, kJacobiSamples)) {
      Mat4 j = evaluate_matrix(f, x);
      RankInfo r = rank_and_determinant(j);
      double n2 = frobenius_norm(j) * frobenius_norm(j);
      worst_pf = std::max(worst_pf, std::fabs(r.pfaffian) / n2);
      bad_rank += r.rank == 2 ? 0 : 1;
      ++points;
    }
  }
  Outcome o;
  o.pass = worst_pf <= kPfaffianRel && bad_rank == 0;
  o.detail = std::to_string(points) + " points, max |pf|/|J|^2 " + fmt("%.3e", worst_pf) + ", rank != 2 at " +
             std::to_string(bad_rank);
  return o;
}

Outcome ac4() {
  test::Rng rng(104);
  double worst = 0.0, worst_factor = 0.0;
  for (int k = 0; k < kSignPatterns; ++k) {
    FamilyStructure f = test::random_case1(rng, true);
    FamilyStructure n = sigma_positive_normalize(f);
    for (const Point4& x : halton_points(f.domain, kNormalizePoints))
      worst = std::max(worst, max_abs(evaluate_matrix(f, x) - evaluate_matrix(n, x)));
    SigmaFactors s = factor_sigma(n.sigma);
    for (int p = 0; p < 6; ++p) {
      auto [i, j] = pair_at(p);
      worst_factor = std::max(worst_factor, std::fabs(s[i] * s[j] - n.sigma(i, j)) / n.sigma(i, j));
    }
  }
  Outcome o;
  o.pass = worst <= kNormalizeTol && worst_factor <= kFactorRel;
  o.detail = std::to_string(kSignPatterns) + " sign patterns x " + std::to_string(kNormalizePoints) +
             " points, max entry change " + fmt("%.3e", worst) + ", max factor error " + fmt("%.3e", worst_factor);
  return o;
}

Outcome ac5() {
  std::vector<FamilyStructure> all = family_gallery();
  for (FamilyStructure& f : label_cover(105)) all.push_back(std::move(f));
  double worst = 0.0, worst_ratio = INFINITY;
  std::vector<std::string> labels;
  for (const FamilyStructure& f : all) {
    CasimirPair p = casimirs_for(f);
    CasimirReport r = verify_casimir(f, p, kCasimirSamples);
    worst = std::max(worst, r.max_residual);
    worst_ratio = std::min(worst_ratio, r.min_singular_ratio);
    if (std::find(labels.begin(), labels.end(), p.label().str()) == labels.end()) labels.push_back(p.label().str());
  }
  Outcome o;
  o.pass = worst <= kCasimirTol && worst_ratio >= kIndependence;
  o.detail = std::to_string(all.size()) + " structures, " + std::to_string(labels.size()) + " labels, max |J'grad C| " +
             fmt("%.3e", worst) + ", min s2/s1 " + fmt("%.3e", worst_ratio);
  return o;
}

Outcome ac6() {
  std::vector<FamilyStructure> all = family_gallery();
  for (FamilyStructure& f : label_cover(106)) all.push_back(std::move(f));
  double worst = 0.0;
  bool signs = true;
  for (const FamilyStructure& f : all) {
    PipelineReport r = verify_pipeline(build_pipeline(f), kPipelineSamples);
    worst = std::max(worst, r.max_deviation);
    signs = signs && r.eta_pp_sign_constant && r.min_abs_eta_pp > 0.0;
  }
  double eta = build_pipeline(test::sstar()).eta_pp(kP);
  Outcome o;
  o.pass = worst <= kPipelineTol && signs && std::fabs(eta - kSstarEtaPP) <= kSstarEtaPPTol;
  o.detail = std::to_string(all.size()) + " pipelines, max deviation " + fmt("%.3e", worst) +
             (signs ? ", eta'' sign constant" : ", eta'' SIGN CHANGE") + ", S* eta'' " + fmt("%.15g", eta);
  return o;
}

Outcome ac7() {
  // The S* box is left at t ~ 0.06; its widened copy holds the full orbit.
  FamilyStructure f = test::gallery_structure("sstar-orbit");
  PoissonSystem sys = PoissonSystem::from_family(f, *f.hamiltonian);
  Trajectory t = integrate(sys, kP, kTEnd, kDt);
  Trajectory h = integrate(sys, kP, kTEnd, kDt / 2);
  double factor = t.drift_c2 / h.drift_c2;
  Outcome o;
  o.pass = !t.truncated && t.max_orthogonality <= kOrthogonalityRel && t.max_casimir_rate <= kCasimirRate &&
           t.max_drift() <= kDriftTol && factor >= kConvergenceMin;
  o.detail = std::string(t.truncated ? "TRUNCATED, " : "") + "orthogonality " + fmt("%.2e", t.max_orthogonality) +
             ", Casimir rate " + fmt("%.2e", t.max_casimir_rate) + ", drift H/C1/C2 " + fmt("%.2e", t.drift_h) + "/" +
             fmt("%.2e", t.drift_c1) + "/" + fmt("%.2e", t.drift_c2) + ", C2 drift factor on halving " +
             fmt("%.2f", factor);
  return o;
}

Outcome ac8() {
  double worst = 0.0;
  int reduced = 0;
  for (const StructureDefinition& d : gallery()) {
    if (!d.leaf_limit) continue;
    FamilyStructure f = d.build();
    Interval axis = f.domain.axis(4);
    for (double c : {axis.lo + 0.25 * (axis.hi - axis.lo), axis.mid(), axis.lo + 0.75 * (axis.hi - axis.lo)}) {
      worst = std::max(worst, max_jacobi3_residual(leaf_reduce(f, c), kJacobi3Samples));
      ++reduced;
    }
  }
  // Random limit structures with leaf-dependent eta.
  test::Rng rng(108);
  for (int k = 0; k < 20; ++k) {
    FamilyStructure r = test::random_case1(rng, true);
    FamilyStructure f = FamilyStructure::make(
        r.sigma, parse("1 + 0.1*x1*x4 + 0.05*x2*x3"),
        {r.psi[0].expr(), r.psi[1].expr(), r.psi[2].expr(), Expr::constant(0.0)},
        {r.phi[0].expr(), r.phi[1].expr(), r.phi[2].expr(), Expr::constant(0.0)}, r.domain);
    worst = std::max(worst, max_jacobi3_residual(leaf_reduce(f, f.domain.axis(4).mid()), kJacobi3Samples));
    ++reduced;
  }
  const StructureDefinition& e = gallery_entry("euler-top-3d");
  ThreeDStructure s = leaf_reduce(e.build(), *e.leaf);
  bool exact = true;
  for (const Point3& y : halton_points3(s.box, kJacobi3Samples)) {
    Mat3 m = s.matrix().eval(y);
    exact = exact && m[0][1] == y[2] && m[0][2] == -y[1] && m[1][2] == y[0];
  }
  Outcome o;
  o.pass = worst <= kJacobi3Tol && exact;
  o.detail = std::to_string(reduced) + " reductions, max 3D residual " + fmt("%.3e", worst) +
             (exact ? ", Euler top exact (J12 = x3, J13 = -x2, J23 = x1)" : ", Euler top MISMATCH");
  return o;
}

Outcome ac9() {
  FamilyStructure f = test::sstar();
  Mat4 j = evaluate_matrix(f, kP);
  const double want[6] = {4, -12, 10, 36, -40, 30};
  double err = 0.0;
  for (int p = 0; p < 6; ++p) {
    auto [a, b] = pair_at(p);
    err = std::max(err, std::fabs(j[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] - want[p]));
  }
  CasimirPair c = casimirs_for(f);
  const double weights[4] = {30, 15, 10, 6};
  for (int i = 0; i < 4; ++i)
    err = std::max(err, std::fabs(c.formula(1).a[static_cast<std::size_t>(i)] - weights[i]));
  double pf = std::fabs(pfaffian(j));
  Outcome o;
  o.pass = err <= kRegressionTol && pf <= kRegressionTol;
  o.detail = "max deviation " + fmt("%.3e", err) + ", pfaffian " + fmt("%.3e", pf);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 Jacobi forward", ac1},      {"AC2 Jacobi converse", ac2},       {"AC3 rank/pfaffian", ac3},
      {"AC4 normalization", ac4},       {"AC5 Casimirs", ac5},              {"AC6 Darboux pipeline", ac6},
      {"AC7 dynamics", ac7},            {"AC8 3D reduction", ac8},          {"AC9 worked example", ac9},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
