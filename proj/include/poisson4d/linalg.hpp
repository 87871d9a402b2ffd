#pragma once

#include <array>

#include "poisson4d/expr.hpp"

namespace p4d {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;
/// d[l][i][j] = partial_l J_ij.
using MatDeriv4 = std::array<Mat4, 4>;

Mat4 zero_mat4();
Mat4 identity_mat4();
Mat4 transpose(const Mat4& a);
Mat4 operator*(const Mat4& a, const Mat4& b);
Vec4 operator*(const Mat4& a, const Vec4& v);
Mat4 operator*(double s, const Mat4& a);
Mat4 operator-(const Mat4& a, const Mat4& b);
double dot(const Vec4& a, const Vec4& b);

/// D * J * D^T.
Mat4 congruence(const Mat4& d, const Mat4& j);

double max_abs(const Mat4& a);
double max_abs(const Vec4& v);
double frobenius_norm(const Mat4& a);
double norm2(const Vec4& v);
/// max |a_ij + a_ji| and |a_ii|.
double skew_defect(const Mat4& a);

/// Laplace expansion along the first two rows (2x2 minors); exact for small
/// integer entries.
double determinant(const Mat4& a);
/// J12 J34 - J13 J24 + J14 J23.
double pfaffian(const Mat4& j);

/// Descending singular values.
std::array<double, 4> singular_values(const Mat4& a);

/// The canonical Darboux block: +1 at (1,2), -1 at (2,1), zeros elsewhere.
Mat4 darboux_canonical();

}  // namespace p4d
