#pragma once

// The four-dimensional family
//
//   J_ij(x) = sigma_ij eta(x) psi_i(x_i) psi_j(x_j) sum_kl eps_ijkl phi_l(x_l)
//
// with symmetric couplings sigma_ij, together with the Jacobi-identity,
// rank and case-classification diagnostics built on it.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "poisson4d/antiderivative.hpp"
#include "poisson4d/domain.hpp"
#include "poisson4d/expr.hpp"
#include "poisson4d/linalg.hpp"
#include "poisson4d/sweep.hpp"

namespace p4d {

/// Index of an unordered pair (i, j), i != j in 1..4, in the storage order
/// (12, 13, 14, 23, 24, 34).
int pair_index(int i, int j);
/// Inverse of pair_index.
std::array<int, 2> pair_at(int index);

/// The six couplings sigma_ij, stored once per unordered pair.
struct SigmaSet {
  std::array<double, 6> values{};  // s12, s13, s14, s23, s24, s34

  SigmaSet() = default;
  SigmaSet(double s12, double s13, double s14, double s23, double s24, double s34)
      : values{s12, s13, s14, s23, s24, s34} {}

  /// sigma_ij = f_i f_j.
  static SigmaSet from_factors(const std::array<double, 4>& f);

  double operator()(int i, int j) const { return values[static_cast<std::size_t>(pair_index(i, j))]; }
  void set(int i, int j, double v) { values[static_cast<std::size_t>(pair_index(i, j))] = v; }
  /// sigma_12 sigma_34.
  double product() const noexcept { return values[0] * values[5]; }
  double max_abs() const noexcept;
  bool any_nonzero() const noexcept;
  /// |sigma_ij| <= 1e-12 max|sigma| counts as zero.
  bool is_zero(int i, int j) const;
  SigmaSet scaled(double s) const;
};

struct CompatibilityResult {
  bool ok = false;
  double residual_13_24 = 0.0;  // |s12 s34 - s13 s24|
  double residual_14_23 = 0.0;  // |s12 s34 - s14 s23|
  double sigma = 0.0;           // s12 s34
};

/// s12 s34 = s13 s24 = s14 s23 within 1e-12 max(1, |s12 s34|).
CompatibilityResult check_sigma_compatibility(const SigmaSet& s);

/// A member of the family on a box domain. psi[i] and phi[i] are functions of
/// x_{i+1} only.
struct FamilyStructure {
  SigmaSet sigma;
  Expr eta;
  std::array<UnivariateFn, 4> psi;
  std::array<UnivariateFn, 4> phi;
  BoxDomain domain;
  std::optional<Expr> hamiltonian;

  /// Builds from expressions; validates variable restrictions and the box but
  /// not the family hypotheses (see check_hypotheses).
  static FamilyStructure make(const SigmaSet& sigma, const Expr& eta, const std::array<Expr, 4>& psi,
                              const std::array<Expr, 4>& phi, const BoxDomain& domain,
                              std::optional<Expr> hamiltonian = std::nullopt);
  static FamilyStructure parse(const SigmaSet& sigma, const std::string& eta,
                               const std::array<std::string, 4>& psi, const std::array<std::string, 4>& phi,
                               const BoxDomain& domain, const std::string& hamiltonian = "");
};

/// phi difference multiplying sigma_ij in the (i, j) entry, as (a, b) with
/// the entry proportional to phi_a - phi_b (i < j).
std::array<int, 2> phi_difference_indices(int i, int j);

/// Structure matrix at x. Throws if x lies outside the box.
Mat4 evaluate_matrix(const FamilyStructure& f, const Point4& x);
/// Same matrix through the explicit Levi-Civita sum; used as an independent
/// check of the entry table.
Mat4 evaluate_matrix_levi_civita(const FamilyStructure& f, const Point4& x);
int levi_civita(int i, int j, int k, int l);

/// Matrix-valued field with first partial derivatives.
struct MatrixField {
  std::function<Mat4(const Point4&)> value;
  std::function<MatDeriv4(const Point4&)> derivative;
};

/// Analytic field of a family structure (no domain check).
MatrixField family_field(const FamilyStructure& f);
/// Field whose entries are arbitrary expressions of x1..x4 (upper triangle
/// given, lower filled by skew-symmetry); derivatives are symbolic.
MatrixField expression_field(const std::array<std::array<Expr, 4>, 4>& upper);
/// Central differences with step h_l = 1e-6 (1 + |x_l|).
MatrixField finite_difference_field(std::function<Mat4(const Point4&)> value);
MatrixField constant_field(const Mat4& m);

/// Maximum over the four triples i < j < k of
/// |sum_l (J_il d_l J_jk + J_kl d_l J_ij + J_jl d_l J_ki)|.
double jacobi_residual(const MatrixField& m, const Point4& x);
/// Maximum of jacobi_residual over points.
double max_jacobi_residual(const MatrixField& m, std::span<const Point4> pts, Exec exec = default_exec());

struct HypothesisReport {
  int samples = 0;
  double min_abs_eta = 0.0;
  std::array<double, 4> min_abs_psi{};
  std::array<double, 6> min_abs_phi_diff{};  // pair order of SigmaSet
  bool eta_sign_constant = true;
  std::array<bool, 4> psi_sign_constant{};
  std::array<bool, 6> phi_diff_sign_constant{};
  std::vector<std::string> flags;

  bool passed() const noexcept { return flags.empty(); }
};

/// Samples n Halton points of the box and reports minima of |eta|, |psi_i|
/// and |phi_i - phi_j| and their sign constancy; values below 1e-9, sign
/// changes and evaluation faults are flagged.
HypothesisReport check_hypotheses(const FamilyStructure& f, int n_samples, std::uint64_t seed = 0,
                                  Exec exec = default_exec());

struct RankInfo {
  int rank = 0;
  double det = 0.0;
  double pfaffian = 0.0;
  std::array<double, 4> singular_values{};
};

/// rank counts singular values above 1e-9 max(1, s_max).
RankInfo rank_and_determinant(const Mat4& j);

/// max over permutations (i,j,k,m) of |J_im J_jk + J_km J_ij + J_jm J_ki|.
double bracket_obstruction(const Mat4& j);

enum class CaseFamily { I, IIA, IIB };

struct CaseLabel {
  CaseFamily family = CaseFamily::I;
  int index = 0;         // pattern number 1..4 for II.A / II.B
  bool generic = true;   // II.A: all three allowed couplings nonzero
  int nonzero_count = 6;

  /// "I", "IIA.1", "IIA.1.nongeneric", "IIB.1.generic", "IIB.1.nongeneric".
  std::string str() const;
  bool operator==(const CaseLabel&) const = default;
};

/// The three nonzero pairs allowed by each pattern (pair indices).
std::array<int, 3> iia_allowed_pairs(int m);
std::array<int, 3> iib_allowed_pairs(int k);

/// Throws p4d::Error if s violates compatibility or is entirely zero.
CaseLabel classify(const SigmaSet& s);

}  // namespace p4d
