#include "poisson4d/reduce3d.hpp"

#include <cmath>

#include "poisson4d/halton.hpp"

namespace p4d {

namespace {

Point4 lift(const Point3& x) { return {x[0], x[1], x[2], 0.0}; }

bool identically_zero(const UnivariateFn& f) { return f.is_constant_expr() && f.expr().eval(Point4{}) == 0.0; }

}  // namespace

Mat3 ExprMatrix3::eval(const Point3& x) const {
  Point4 p = lift(x);
  double a = j12.eval(p), b = j13.eval(p), c = j23.eval(p);
  return Mat3{{{0.0, a, b}, {-a, 0.0, c}, {-b, -c, 0.0}}};
}

double jacobi3_residual(const ExprMatrix3& m, const Point3& x) {
  Point4 p = lift(x);
  Mat3 j = m.eval(x);
  // d[l][k]: derivative of entry k (0: J12, 1: J13, 2: J23) along x_{l+1}.
  std::array<std::array<double, 3>, 3> d{};
  for (int l = 0; l < 3; ++l) {
    d[static_cast<std::size_t>(l)] = {differentiate(m.j12, l + 1).eval(p), differentiate(m.j13, l + 1).eval(p),
                                      differentiate(m.j23, l + 1).eval(p)};
  }
  double s = 0.0;
  for (std::size_t l = 0; l < 3; ++l) {
    double d12 = d[l][0], d31 = -d[l][1], d23 = d[l][2];
    s += j[0][l] * d23 + j[2][l] * d12 + j[1][l] * d31;
  }
  return std::fabs(s);
}

ExprMatrix3 ThreeDStructure::matrix() const {
  using namespace build;
  ExprMatrix3 m;
  m.j12 = mul(mul(mul(eta, psi[0].expr()), psi[1].expr()), phi[2].expr());
  m.j13 = neg(mul(mul(mul(eta, psi[0].expr()), psi[2].expr()), phi[1].expr()));
  m.j23 = mul(mul(mul(eta, psi[1].expr()), psi[2].expr()), phi[0].expr());
  return m;
}

Point3 ThreeDStructure::midpoint() const { return {box[0].mid(), box[1].mid(), box[2].mid()}; }

ThreeDStructure leaf_reduce(const FamilyStructure& f, double c) {
  if (!identically_zero(f.psi[3]) || !identically_zero(f.phi[3])) {
    throw Error("leaf reduction requires the declared limit psi4 = phi4 = 0");
  }
  const Interval& x4 = f.domain.axis(4);
  if (!(c >= x4.lo && c <= x4.hi)) {
    throw Error("leaf constant " + format_number(c) + " outside the x4 interval [" + format_number(x4.lo) + ", " +
                format_number(x4.hi) + "]");
  }
  ThreeDStructure s;
  s.eta = substitute(f.eta, 4, c);
  s.leaf = c;
  // phi~_i = sigma_jk phi_i with {i, j, k} = {1, 2, 3}.
  const std::array<double, 3> w = {f.sigma(2, 3), f.sigma(1, 3), f.sigma(1, 2)};
  for (std::size_t i = 0; i < 3; ++i) {
    s.psi[i] = f.psi[i];
    const UnivariateFn& phi = f.phi[i];
    s.phi[i] = UnivariateFn(build::mul(build::constant(w[i]), phi.expr()), phi.var(), phi.interval());
    s.box[i] = f.domain.axis(static_cast<int>(i) + 1);
  }
  return s;
}

std::vector<Point3> halton_points3(const std::array<Interval, 3>& box, std::size_t n, std::uint64_t seed) {
  static constexpr unsigned kBases[3] = {2, 3, 5};
  std::vector<Point3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < 3; ++d) {
      double u = radical_inverse(kBases[d], i + 1 + seed);
      pts[i][d] = box[d].lo + u * box[d].width();
    }
  }
  return pts;
}

double max_jacobi3_residual(const ThreeDStructure& s, int n, std::uint64_t seed) {
  ExprMatrix3 m = s.matrix();
  double r = 0.0;
  for (const Point3& x : halton_points3(s.box, static_cast<std::size_t>(n), seed)) {
    r = std::max(r, jacobi3_residual(m, x));
  }
  return r;
}

SeparableReport is_separable(const FamilyStructure& f, int samples) {
  SeparableReport rep;
  bool constant = f.eta.is_constant();
  for (const UnivariateFn& phi : f.phi) constant = constant && phi.is_constant_expr();
  if (!constant) {
    // Expression trees that are constant in value but not in form.
    bool flat = true;
    std::array<Expr, 4> deta{differentiate(f.eta, 1), differentiate(f.eta, 2), differentiate(f.eta, 3),
                             differentiate(f.eta, 4)};
    std::array<Expr, 4> dphi;
    for (std::size_t i = 0; i < 4; ++i) dphi[i] = differentiate(f.phi[i].expr(), f.phi[i].var());
    for (const Point4& x : halton_points(f.domain, static_cast<std::size_t>(samples))) {
      for (std::size_t i = 0; i < 4 && flat; ++i) {
        flat = std::fabs(deta[i].eval(x)) <= 1e-14 && std::fabs(dphi[i].eval(x)) <= 1e-14;
      }
      if (!flat) break;
    }
    if (!flat) {
      rep.note = "eta or some phi_i is not constant";
      return rep;
    }
  }
  rep.separable = true;
  Point4 mid = f.domain.midpoint();
  double eta = f.eta.eval(mid);
  rep.a = zero_mat4();
  for (int p = 0; p < 6; ++p) {
    auto [i, j] = pair_at(p);
    auto [u, v] = phi_difference_indices(i, j);
    double val = f.sigma(i, j) * eta *
                 (f.phi[static_cast<std::size_t>(u - 1)](mid[static_cast<std::size_t>(u - 1)]) -
                  f.phi[static_cast<std::size_t>(v - 1)](mid[static_cast<std::size_t>(v - 1)]));
    rep.a[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = val;
    rep.a[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)] = -val;
  }
  RankInfo r = rank_and_determinant(rep.a);
  rep.rank = r.rank;
  rep.pfaffian = r.pfaffian;
  rep.note = "family members give rank(A) = 2 only; not every separable 4D matrix arises this way";
  return rep;
}

}  // namespace p4d
