#include "poisson4d/casimir.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "poisson4d/halton.hpp"

namespace p4d {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i - 1); }

UnivariateFn reciprocal(const UnivariateFn& f) {
  return UnivariateFn(build::div(build::constant(1.0), f.expr()), f.var(), f.interval());
}

UnivariateFn quotient(const UnivariateFn& num, const UnivariateFn& den) {
  return UnivariateFn(build::div(num.expr(), den.expr()), num.var(), num.interval());
}

}  // namespace

YCoordinates YCoordinates::pulled_back(const FamilyStructure& f) {
  YCoordinates c;
  c.pulled_back_ = true;
  for (std::size_t i = 0; i < 4; ++i) {
    c.phi_[i] = f.phi[i];
    c.dphi_[i] = differentiate(f.phi[i].expr(), f.phi[i].var());
    c.psi_[i] = f.psi[i];
    c.y_map_[i] = Antiderivative::of(reciprocal(f.psi[i]));
    c.phi_integral_[i] = Antiderivative::of(quotient(f.phi[i], f.psi[i]));
  }
  return c;
}

YCoordinates YCoordinates::direct(const std::array<UnivariateFn, 4>& phi_y) {
  YCoordinates c;
  c.pulled_back_ = false;
  for (std::size_t i = 0; i < 4; ++i) {
    c.phi_[i] = phi_y[i];
    c.dphi_[i] = differentiate(phi_y[i].expr(), phi_y[i].var());
    c.phi_integral_[i] = Antiderivative::of(phi_y[i]);
  }
  return c;
}

YSample YCoordinates::sample(const Point4& p) const {
  YSample s;
  for (std::size_t i = 0; i < 4; ++i) {
    double t = p[i];
    s.phi[i] = phi_[i](t);
    double dphi = dphi_[i].eval(p);
    s.phi_integral[i] = phi_integral_[i](t);
    if (pulled_back_) {
      double psi = psi_[i](t);
      s.y[i] = y_map_[i](t);
      s.dy_dx[i] = 1.0 / psi;
      s.dphi_dy[i] = dphi * psi;
    } else {
      s.y[i] = t;
      s.dy_dx[i] = 1.0;
      s.dphi_dy[i] = dphi;
    }
  }
  return s;
}

std::optional<Expr> YCoordinates::y_expression(int i) const {
  if (!pulled_back_) return build::var(i);
  return y_map_[idx(i)].expression();
}

std::optional<Expr> YCoordinates::phi_expression(int i) const { return phi_[idx(i)].expr(); }

std::optional<Expr> YCoordinates::phi_integral_expression(int i) const {
  return phi_integral_[idx(i)].expression();
}

std::string YCoordinates::describe_y(int i) const {
  if (!pulled_back_) return "x" + std::to_string(i);
  return y_map_[idx(i)].describe();
}

std::string YCoordinates::describe_phi_integral(int i) const { return phi_integral_[idx(i)].describe(); }

double CasimirFormula::value(const YSample& s) const {
  double lin = 0.0, integral = 0.0, coupling = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    lin += a[i] * s.y[i];
    integral += b[i] * s.phi_integral[i];
    coupling += c[i] * s.y[i];
  }
  double v = lin + integral;
  if (q != 0) v -= coupling * s.phi[idx(q)];
  return v;
}

Vec4 CasimirFormula::gradient_y(const YSample& s) const {
  Vec4 g{};
  double coupling = 0.0;
  for (std::size_t i = 0; i < 4; ++i) coupling += c[i] * s.y[i];
  double phi_q = q != 0 ? s.phi[idx(q)] : 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    g[i] = a[i] + b[i] * s.phi[i];
    if (q != 0) g[i] -= c[i] * phi_q;
  }
  if (q != 0) g[idx(q)] -= coupling * s.dphi_dy[idx(q)];
  return g;
}

CasimirPair::CasimirPair(CasimirFormula c1, CasimirFormula c2, std::shared_ptr<const YCoordinates> coords,
                         CaseLabel label, std::string formula_id)
    : c1_(c1), c2_(c2), coords_(std::move(coords)), label_(label), formula_id_(std::move(formula_id)) {
  if (!coords_) throw Error("CasimirPair requires coordinates");
}

CasimirValues CasimirPair::evaluate(const Point4& p) const {
  YSample s = coords_->sample(p);
  CasimirValues v;
  v.c1 = c1_.value(s);
  v.c2 = c2_.value(s);
  v.grad1_y = c1_.gradient_y(s);
  v.grad2_y = c2_.gradient_y(s);
  for (std::size_t i = 0; i < 4; ++i) {
    v.grad1_x[i] = v.grad1_y[i] * s.dy_dx[i];
    v.grad2_x[i] = v.grad2_y[i] * s.dy_dx[i];
  }
  return v;
}

std::optional<Expr> CasimirPair::expression(int k) const {
  const CasimirFormula& f = formula(k);
  Expr total = build::constant(0.0);
  Expr coupling = build::constant(0.0);
  for (int i = 1; i <= 4; ++i) {
    double a = f.a[idx(i)], b = f.b[idx(i)], c = f.c[idx(i)];
    if (a != 0.0 || c != 0.0) {
      auto y = coords_->y_expression(i);
      if (!y) return std::nullopt;
      if (a != 0.0) total = total + build::constant(a) * *y;
      if (c != 0.0) coupling = coupling + build::constant(c) * *y;
    }
    if (b != 0.0) {
      auto integral = coords_->phi_integral_expression(i);
      if (!integral) return std::nullopt;
      total = total + build::constant(b) * *integral;
    }
  }
  if (f.q != 0 && !coupling.is_constant()) total = total - coupling * *coords_->phi_expression(f.q);
  return total;
}

std::string CasimirPair::describe(int k) const {
  if (auto e = expression(k)) return e->str();
  const CasimirFormula& f = formula(k);
  std::string out;
  auto term = [&out](double coef, const std::string& what) {
    if (coef == 0.0) return;
    if (!out.empty()) out += " + ";
    out += format_number(coef) + " * [" + what + "]";
  };
  for (int i = 1; i <= 4; ++i) term(f.a[idx(i)], "y" + std::to_string(i) + " = " + coords_->describe_y(i));
  for (int i = 1; i <= 4; ++i)
    term(f.b[idx(i)], "Phi" + std::to_string(i) + " = " + coords_->describe_phi_integral(i));
  if (f.q != 0) {
    std::string c;
    for (int i = 1; i <= 4; ++i) {
      if (f.c[idx(i)] == 0.0) continue;
      if (!c.empty()) c += " + ";
      c += format_number(f.c[idx(i)]) + " y" + std::to_string(i);
    }
    if (!c.empty()) out += " - (" + c + ") * phi" + std::to_string(f.q);
  }
  return out.empty() ? "0" : out;
}

CasimirPair casimirs_case1(const SigmaFactors& f, std::shared_ptr<const YCoordinates> coords) {
  CasimirFormula c1, c2;
  double p = f.product();
  for (int i = 1; i <= 4; ++i) {
    c1.a[idx(i)] = p / f[i];
    c2.b[idx(i)] = p / f[i];
  }
  CaseLabel label;
  return CasimirPair(c1, c2, std::move(coords), label, "I");
}

CasimirPair casimirs_caseIIA(int m, const SigmaSet& s, std::shared_ptr<const YCoordinates> coords) {
  // q: the coordinate Casimir index; w: coefficients on the other three.
  int q = 0;
  Vec4 w{};
  switch (m) {
    case 1:
      q = 4;
      w = {s(2, 3), s(1, 3), s(1, 2), 0.0};
      break;
    case 2:
      q = 1;
      w = {0.0, s(3, 4), s(2, 4), s(2, 3)};
      break;
    case 3:
      q = 2;
      w = {s(3, 4), 0.0, s(1, 4), s(1, 3)};
      break;
    case 4:
      q = 3;
      w = {s(2, 4), s(1, 4), 0.0, s(1, 2)};
      break;
    default:
      throw Error("II.A pattern index must be 1..4");
  }
  CasimirFormula c1, c2;
  c1.a[idx(q)] = 1.0;
  c2.b = w;
  c2.c = w;
  c2.q = q;
  CaseLabel label{CaseFamily::IIA, m, true, 3};
  return CasimirPair(c1, c2, std::move(coords), label, "IIA." + std::to_string(m));
}

CasimirPair casimirs_caseIIB_generic(int k, const SigmaSet& s, std::shared_ptr<const YCoordinates> coords) {
  Vec4 w{};
  switch (k) {
    case 1:
      w = {s(2, 3) * s(2, 4), 0.0, s(1, 2) * s(2, 4), s(1, 2) * s(2, 3)};
      break;
    case 2:
      w = {s(2, 4) * s(3, 4), s(1, 4) * s(3, 4), s(1, 4) * s(2, 4), 0.0};
      break;
    case 3:
      w = {s(2, 3) * s(3, 4), s(1, 3) * s(3, 4), 0.0, s(1, 3) * s(2, 3)};
      break;
    case 4:
      w = {0.0, s(1, 3) * s(1, 4), s(1, 2) * s(1, 4), s(1, 2) * s(1, 3)};
      break;
    default:
      throw Error("II.B pattern index must be 1..4");
  }
  CasimirFormula c1, c2;
  c1.a = w;
  c2.b = w;
  CaseLabel label{CaseFamily::IIB, k, true, 3};
  return CasimirPair(c1, c2, std::move(coords), label, "IIB." + std::to_string(k) + ".generic");
}

CasimirPair casimirs_nongeneric(const SigmaSet& s, std::shared_ptr<const YCoordinates> coords) {
  CaseLabel label = classify(s);
  if (label.family == CaseFamily::I || label.generic) {
    throw Error("casimirs_nongeneric called on generic pattern " + label.str());
  }
  if (label.family == CaseFamily::IIB) throw Error("II.B nongeneric patterns are absorbed by II.A");
  SigmaSet clean = s;
  for (int p = 0; p < 6; ++p) {
    auto [i, j] = pair_at(p);
    if (s.is_zero(i, j)) clean.values[static_cast<std::size_t>(p)] = 0.0;
  }
  if (label.nonzero_count >= 2) {
    CasimirPair base = casimirs_caseIIA(label.index, clean, coords);
    return CasimirPair(base.formula(1), base.formula(2), std::move(coords), label, label.str());
  }
  // One coupling (i, j): the complementary coordinates are Casimirs.
  int i = 0, j = 0;
  for (int p = 0; p < 6; ++p) {
    if (clean.values[static_cast<std::size_t>(p)] == 0.0) continue;
    i = pair_at(p)[0];
    j = pair_at(p)[1];
  }
  std::vector<int> rest;
  for (int r = 1; r <= 4; ++r)
    if (r != i && r != j) rest.push_back(r);
  CasimirFormula c1, c2;
  c1.a[idx(rest[0])] = 1.0;
  c2.a[idx(rest[1])] = 1.0;
  return CasimirPair(c1, c2, std::move(coords), label, label.str() + ".coordinates");
}

CasimirPair casimirs_for(const FamilyStructure& f) {
  CaseLabel label = classify(f.sigma);
  if (label.family == CaseFamily::I) {
    FamilyStructure n = sigma_positive_normalize(f);
    auto coords = std::make_shared<const YCoordinates>(YCoordinates::pulled_back(n));
    return casimirs_case1(factor_sigma(n.sigma), coords);
  }
  auto coords = std::make_shared<const YCoordinates>(YCoordinates::pulled_back(f));
  if (!label.generic) return casimirs_nongeneric(f.sigma, coords);
  if (label.family == CaseFamily::IIA) return casimirs_caseIIA(label.index, f.sigma, coords);
  return casimirs_caseIIB_generic(label.index, f.sigma, coords);
}

CasimirReport verify_casimir(const FamilyStructure& f, const CasimirPair& p, int n, std::uint64_t seed, Exec exec) {
  struct Row {
    double r1, r2, s1, s2;
  };
  std::vector<Point4> pts = halton_points(f.domain, static_cast<std::size_t>(n), seed);
  std::vector<Row> rows = map_points<Row>(
      pts,
      [&](const Point4& x) {
        Mat4 j = evaluate_matrix(f, x);
        YSample s = p.coordinates().sample(x);
        Mat4 d = zero_mat4();
        for (std::size_t i = 0; i < 4; ++i) d[i][i] = s.dy_dx[i];
        Mat4 jy = congruence(d, j);
        Vec4 g1 = p.formula(1).gradient_y(s), g2 = p.formula(2).gradient_y(s);
        Mat4 g = zero_mat4();
        g[0] = g1;
        g[1] = g2;
        auto sv = singular_values(g);
        return Row{max_abs(jy * g1), max_abs(jy * g2), sv[0], sv[1]};
      },
      exec);
  CasimirReport r;
  r.samples = n;
  r.min_second_singular = rows.empty() ? 0.0 : INFINITY;
  r.min_singular_ratio = rows.empty() ? 0.0 : INFINITY;
  for (const Row& row : rows) {
    r.max_residual_each[0] = std::max(r.max_residual_each[0], row.r1);
    r.max_residual_each[1] = std::max(r.max_residual_each[1], row.r2);
    r.min_second_singular = std::min(r.min_second_singular, row.s2);
    r.min_singular_ratio = std::min(r.min_singular_ratio, row.s1 > 0.0 ? row.s2 / row.s1 : 0.0);
  }
  r.max_residual = std::max(r.max_residual_each[0], r.max_residual_each[1]);
  return r;
}

}  // namespace p4d
