#pragma once

// Casimir invariants of the family, written in the coordinates
// y_i = integral dx_i / psi_i(x_i) in which the psi factors disappear.
//
// Every Casimir used here has the form
//
//   C(y) = sum_i a_i y_i + sum_i b_i Phi_i(y_i) - (sum_i c_i y_i) phi_q(y_q)
//
// where Phi_i is an antiderivative of phi_i in y_i and q is a fixed index (or
// absent). The coefficient tables per case live in casimir.cpp.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "poisson4d/antiderivative.hpp"
#include "poisson4d/linalg.hpp"
#include "poisson4d/normal_form.hpp"
#include "poisson4d/structure.hpp"

namespace p4d {

/// y-coordinate quantities at one evaluation point.
struct YSample {
  Vec4 y{};
  Vec4 phi{};           // phi_i at y_i
  Vec4 dphi_dy{};       // d phi_i / d y_i
  Vec4 phi_integral{};  // Phi_i(y_i)
  Vec4 dy_dx{};         // 1 / psi_i(x_i); all ones for direct coordinates
};

/// Source of y-coordinate data. Pulled-back coordinates are evaluated at an
/// x-point (the y-map is applied forward, never inverted); direct coordinates
/// take the point to be y itself.
class YCoordinates {
 public:
  /// y_i = integral of 1/psi_i from the interval midpoint; phi_i(y_i) is
  /// phi_i(x_i) and Phi_i = integral of phi_i / psi_i dx_i.
  static YCoordinates pulled_back(const FamilyStructure& f);
  /// phi given as functions of y_i; Phi_i from the interval midpoint.
  static YCoordinates direct(const std::array<UnivariateFn, 4>& phi_y);

  YSample sample(const Point4& p) const;
  bool is_pulled_back() const noexcept { return pulled_back_; }

  /// Closed forms in the evaluation-point variables, when available.
  std::optional<Expr> y_expression(int i) const;
  std::optional<Expr> phi_expression(int i) const;
  std::optional<Expr> phi_integral_expression(int i) const;
  std::string describe_y(int i) const;
  std::string describe_phi_integral(int i) const;

 private:
  bool pulled_back_ = false;
  std::array<UnivariateFn, 4> phi_;
  std::array<Expr, 4> dphi_;
  std::array<UnivariateFn, 4> psi_;  // pulled-back only
  std::array<Antiderivative, 4> y_map_;
  std::array<Antiderivative, 4> phi_integral_;
};

struct CasimirFormula {
  Vec4 a{};
  Vec4 b{};
  Vec4 c{};
  int q = 0;  // 1..4, or 0 when the c-term is absent

  double value(const YSample& s) const;
  Vec4 gradient_y(const YSample& s) const;
};

struct CasimirValues {
  double c1 = 0.0;
  double c2 = 0.0;
  Vec4 grad1_y{}, grad2_y{};
  Vec4 grad1_x{}, grad2_x{};  // pullback gradients, grad_y scaled by dy/dx
};

class CasimirPair {
 public:
  CasimirPair(CasimirFormula c1, CasimirFormula c2, std::shared_ptr<const YCoordinates> coords, CaseLabel label,
              std::string formula_id);

  CasimirValues evaluate(const Point4& p) const;
  const CasimirFormula& formula(int k) const { return k == 1 ? c1_ : c2_; }
  const YCoordinates& coordinates() const noexcept { return *coords_; }
  const CaseLabel& label() const noexcept { return label_; }
  const std::string& formula_id() const noexcept { return formula_id_; }

  /// C_k as an expression in the evaluation-point variables, or nullopt when
  /// some required antiderivative is quadrature-backed.
  std::optional<Expr> expression(int k) const;
  /// expression(k)->str(), or a term-by-term quadrature-backed descriptor.
  std::string describe(int k) const;

 private:
  CasimirFormula c1_, c2_;
  std::shared_ptr<const YCoordinates> coords_;
  CaseLabel label_;
  std::string formula_id_;
};

/// C1 = sum_i (s1 s2 s3 s4 / s_i) y_i, C2 = s1 s2 s3 s4 sum_i Phi_i / s_i.
CasimirPair casimirs_case1(const SigmaFactors& f, std::shared_ptr<const YCoordinates> coords);
/// Coordinate Casimir plus the quadratic-coupling Casimir of pattern II.A.m.
CasimirPair casimirs_caseIIA(int m, const SigmaSet& s, std::shared_ptr<const YCoordinates> coords);
/// Linear and integral Casimirs of the generic pattern II.B.k.
CasimirPair casimirs_caseIIB_generic(int k, const SigmaSet& s, std::shared_ptr<const YCoordinates> coords);
/// Absorbed nongeneric couplings: II.A formulas with the vanishing couplings
/// dropped, or the two complementary coordinates when one coupling remains.
CasimirPair casimirs_nongeneric(const SigmaSet& s, std::shared_ptr<const YCoordinates> coords);

/// Classifies f, normalizes it in Case I, and builds the matching pair on
/// pulled-back coordinates of the (normalized) structure.
CasimirPair casimirs_for(const FamilyStructure& f);

struct CasimirReport {
  int samples = 0;
  double max_residual = 0.0;  // max_k max_x ||J'(y) grad_y C_k||_inf
  std::array<double, 2> max_residual_each{};
  double min_second_singular = 0.0;  // of the stacked 2x4 gradient matrix
  double min_singular_ratio = 0.0;   // min of s2 / s1
  bool independent(double ratio = 1e-6) const noexcept { return min_singular_ratio >= ratio; }
};

/// J'(y) = D J(x) D^T with D = diag(dy/dx) from the pair's coordinates.
CasimirReport verify_casimir(const FamilyStructure& f, const CasimirPair& p, int n, std::uint64_t seed = 0,
                             Exec exec = default_exec());

}  // namespace p4d
