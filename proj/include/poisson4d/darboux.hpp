#pragma once

// Global Darboux reduction: x -> y (psi factors removed), then y -> z with
// rows {e_a, e_b, grad C, grad C}, then the time factor eta''.
//
// Inverse maps are never formed. Every evaluator below is keyed by the
// original x-sample: a stage-2 map "at x" means the map evaluated at y(x).

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "poisson4d/casimir.hpp"
#include "poisson4d/structure.hpp"

namespace p4d {

struct CoordMap {
  std::vector<std::string> description;
  std::function<Vec4(const Point4&)> forward;
  std::function<Mat4(const Point4&)> jacobian;

  static CoordMap identity();
};

/// (second o first): forward from second, Jacobian second(x) * first(x).
CoordMap compose(const CoordMap& first, const CoordMap& second);

/// y_i = integral of 1/psi_i from the interval midpoint; Jacobian diag(1/psi).
/// Throws p4d::Error if some psi_i changes sign or vanishes on the samples.
CoordMap y_map(const FamilyStructure& f, int samples = 200);

/// (du/dx) J(x) (du/dx)^T. Throws if the Jacobian is singular at x.
Mat4 pushforward_matrix(const MatrixField& m, const CoordMap& map, const Point4& x);

struct DarbouxPipeline {
  CaseLabel label;
  std::array<int, 2> retained{1, 2};
  CoordMap stage1;
  CoordMap stage2;
  Mat4 target = darboux_canonical();
  MatrixField field;
  BoxDomain domain;
  /// Closed form sigma_ab eta (phi_p - phi_q) of the working structure, when
  /// the pipeline comes from a family member.
  std::function<double(const Point4&)> closed_form;
  std::optional<Expr> closed_form_expression;
  std::optional<CasimirPair> casimirs;

  /// Composite pushforward T(x) through both stages.
  Mat4 transformed(const Point4& x) const;
  /// The (1, 2) entry of T(x).
  double eta_pp(const Point4& x) const { return transformed(x)[0][1]; }

  static DarbouxPipeline from_maps(const MatrixField& field, const CoordMap& stage1, const CoordMap& stage2,
                                   const BoxDomain& domain);
};

/// Retained pair: lexicographically first (i, j) with sigma_ij != 0. Case I
/// runs on the sigma-positive normalization of f. Throws when a stage
/// Jacobian is singular at one of `samples` Halton points.
DarbouxPipeline build_pipeline(const FamilyStructure& f, int samples = 200);

struct PipelineReport {
  int samples = 0;
  double max_deviation = 0.0;         // max |T - eta'' J_D| entrywise
  double max_frozen_rows = 0.0;       // max |T_ij| over rows/columns 3, 4
  double max_closed_form_gap = 0.0;   // max |eta'' - closed form| / max(1, |eta''|)
  double min_abs_eta_pp = 0.0;
  double max_abs_eta_pp = 0.0;
  bool eta_pp_sign_constant = true;
  double min_abs_det_stage1 = 0.0;
  double min_abs_det_stage2 = 0.0;
};

PipelineReport verify_pipeline(const DarbouxPipeline& p, int n, std::uint64_t seed = 0, Exec exec = default_exec());

/// x -> mu(x) J(x) grad H(x). Throws if mu vanishes or changes sign on
/// `samples` Halton points of the domain.
std::function<Vec4(const Point4&)> reparametrized_vector_field(const MatrixField& m, const Expr& h,
                                                                std::function<double(const Point4&)> mu,
                                                                const BoxDomain& domain, int samples = 200);

/// Gradient of an expression in x1..x4 as four derivative expressions.
std::array<Expr, 4> gradient_exprs(const Expr& h);

}  // namespace p4d
