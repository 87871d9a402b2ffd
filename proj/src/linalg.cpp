#include "poisson4d/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace p4d {

Mat4 zero_mat4() { return Mat4{}; }

Mat4 identity_mat4() {
  Mat4 m{};
  for (std::size_t i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

Mat4 transpose(const Mat4& a) {
  Mat4 t{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) t[i][j] = a[j][i];
  return t;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 4; ++k) {
      double aik = a[i][k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < 4; ++j) c[i][j] += aik * b[k][j];
    }
  return c;
}

Vec4 operator*(const Mat4& a, const Vec4& v) {
  Vec4 r{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r[i] += a[i][j] * v[j];
  return r;
}

Mat4 operator*(double s, const Mat4& a) {
  Mat4 r = a;
  for (auto& row : r)
    for (double& v : row) v *= s;
  return r;
}

Mat4 operator-(const Mat4& a, const Mat4& b) {
  Mat4 r{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

double dot(const Vec4& a, const Vec4& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += a[i] * b[i];
  return s;
}

Mat4 congruence(const Mat4& d, const Mat4& j) { return d * j * transpose(d); }

double max_abs(const Mat4& a) {
  double m = 0.0;
  for (const auto& row : a)
    for (double v : row) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs(const Vec4& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double frobenius_norm(const Mat4& a) {
  double s = 0.0;
  for (const auto& row : a)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

double norm2(const Vec4& v) { return std::sqrt(dot(v, v)); }

double skew_defect(const Mat4& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i; j < 4; ++j) m = std::max(m, std::fabs(a[i][j] + a[j][i]) * (i == j ? 0.5 : 1.0));
  return m;
}

double determinant(const Mat4& a) {
  // det = sum over column pairs of (+/-) minor(rows 0,1) * complementary minor(rows 2,3)
  auto m2 = [](double p, double q, double r, double s) { return p * s - q * r; };
  auto top = [&](std::size_t c0, std::size_t c1) { return m2(a[0][c0], a[0][c1], a[1][c0], a[1][c1]); };
  auto bot = [&](std::size_t c0, std::size_t c1) { return m2(a[2][c0], a[2][c1], a[3][c0], a[3][c1]); };
  return top(0, 1) * bot(2, 3) - top(0, 2) * bot(1, 3) + top(0, 3) * bot(1, 2) + top(1, 2) * bot(0, 3) -
         top(1, 3) * bot(0, 2) + top(2, 3) * bot(0, 1);
}

double pfaffian(const Mat4& j) { return j[0][1] * j[2][3] - j[0][2] * j[1][3] + j[0][3] * j[1][2]; }

std::array<double, 4> singular_values(const Mat4& a) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(m);
  const auto& s = svd.singularValues();
  return {s(0), s(1), s(2), s(3)};
}

Mat4 darboux_canonical() {
  Mat4 d{};
  d[0][1] = 1.0;
  d[1][0] = -1.0;
  return d;
}

}  // namespace p4d
