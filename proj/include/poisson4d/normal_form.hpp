#pragma once

#include <array>
#include <string>

#include "poisson4d/structure.hpp"

namespace p4d {

/// Sign redefinitions that make every coupling positive without changing the
/// structure matrix: phi_i -> -phi_i for all i when flip_phi, psi_i -> -psi_i
/// where flip_psi[i-1].
struct SignFlips {
  bool flip_phi = false;
  std::array<bool, 4> flip_psi{};
  /// Name of the case-table branch taken, e.g. "3.1.2" or "4.3 (relabelled)".
  std::string branch;
};

/// Case-table lookup for an all-nonzero coupling set. Throws p4d::Error if a
/// coupling vanishes or the sign pattern is inconsistent with compatibility.
SignFlips sigma_positive_flips(const SigmaSet& s);

/// Equivalent structure with sigma_ij replaced by |sigma_ij| and the flips
/// applied as negation wrappers on the affected phi/psi expressions.
FamilyStructure sigma_positive_normalize(const FamilyStructure& f);

struct SigmaFactors {
  std::array<double, 4> values{};
  double operator[](int i) const { return values[static_cast<std::size_t>(i - 1)]; }
  /// sigma_1 sigma_2 sigma_3 sigma_4.
  double product() const noexcept { return values[0] * values[1] * values[2] * values[3]; }
};

/// The unique positive sigma_i with sigma_i sigma_j = sigma_ij. Throws on a
/// nonpositive entry or a compatibility violation.
SigmaFactors factor_sigma(const SigmaSet& s);

}  // namespace p4d
