#pragma once

// Three-dimensional limits of the family: the symplectic-leaf reduction at
// x4 = c, and recognition of the separable members J_ij = a_ij psi_i psi_j.

#include <array>
#include <string>

#include "poisson4d/structure.hpp"

namespace p4d {

using Point3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// 3x3 skew matrix field given by its upper entries J12, J13, J23 as
/// expressions in x1..x3.
struct ExprMatrix3 {
  Expr j12, j13, j23;
  Mat3 eval(const Point3& x) const;
};

/// |sum_l (J_1l d_l J_23 + J_3l d_l J_12 + J_2l d_l J_31)| with symbolic
/// derivatives.
double jacobi3_residual(const ExprMatrix3& m, const Point3& x);

struct ThreeDStructure {
  Expr eta;                         // depends on x1..x3 only
  std::array<UnivariateFn, 3> psi;
  std::array<UnivariateFn, 3> phi;  // already weighted: phi~_i = sigma_jk phi_i
  std::array<Interval, 3> box;
  double leaf = 0.0;

  /// J12 = eta psi1 psi2 phi3, J13 = -eta psi1 psi3 phi2, J23 = eta psi2 psi3 phi1.
  ExprMatrix3 matrix() const;
  Point3 midpoint() const;
};

/// Reduction of a limit structure (psi4 and phi4 the constant 0) to the leaf
/// x4 = c. Throws if psi4 or phi4 is not identically zero or c lies outside
/// the x4 interval.
ThreeDStructure leaf_reduce(const FamilyStructure& f, double c);

/// n deterministic Halton points in the 3D box (bases 2, 3, 5).
std::vector<Point3> halton_points3(const std::array<Interval, 3>& box, std::size_t n, std::uint64_t seed = 0);

/// max jacobi3_residual over n Halton points of the box.
double max_jacobi3_residual(const ThreeDStructure& s, int n, std::uint64_t seed = 0);

struct SeparableReport {
  bool separable = false;
  Mat4 a{};  // a_ij = sigma_ij eta (phi_p - phi_q), skew
  int rank = 0;
  double pfaffian = 0.0;
  std::string note;
};

/// Separable iff eta and every phi_i are constant, either as expression trees
/// or (failing that) with all first derivatives <= 1e-14 at the samples.
SeparableReport is_separable(const FamilyStructure& f, int samples = 200);

}  // namespace p4d
