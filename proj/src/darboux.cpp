#include "poisson4d/darboux.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "poisson4d/halton.hpp"
#include "poisson4d/normal_form.hpp"

namespace p4d {

namespace {

// Fails when the rows of a are numerically dependent relative to their
// lengths.
bool singular(const Mat4& a) {
  double scale = 1.0;
  for (const Vec4& row : a) scale *= norm2(row);
  return scale == 0.0 || std::fabs(determinant(a)) <= 1e-12 * scale;
}

void sign_scan(const std::vector<Point4>& pts, const std::function<double(const Point4&)>& g, const char* what) {
  double first = 0.0;
  for (const Point4& x : pts) {
    double v = g(x);
    if (!std::isfinite(v) || std::fabs(v) < 1e-9) {
      throw Error(std::string(what) + " vanishes at " + format_point(x));
    }
    if (first == 0.0) first = v;
    if ((v > 0.0) != (first > 0.0)) throw Error(std::string(what) + " changes sign near " + format_point(x));
  }
}

}  // namespace

CoordMap CoordMap::identity() {
  CoordMap m;
  m.description = {"u1 = x1", "u2 = x2", "u3 = x3", "u4 = x4"};
  m.forward = [](const Point4& x) { return x; };
  m.jacobian = [](const Point4&) { return identity_mat4(); };
  return m;
}

CoordMap compose(const CoordMap& first, const CoordMap& second) {
  CoordMap m;
  m.description = second.description;
  m.forward = second.forward;
  m.jacobian = [a = first.jacobian, b = second.jacobian](const Point4& x) { return b(x) * a(x); };
  return m;
}

CoordMap y_map(const FamilyStructure& f, int samples) {
  std::vector<Point4> pts = halton_points(f.domain, static_cast<std::size_t>(samples));
  for (std::size_t i = 0; i < 4; ++i) {
    const UnivariateFn& psi = f.psi[i];
    std::string what = "psi" + std::to_string(i + 1);
    sign_scan(pts, [&psi, i](const Point4& x) { return psi(x[i]); }, what.c_str());
  }
  auto coords = std::make_shared<const YCoordinates>(YCoordinates::pulled_back(f));
  CoordMap m;
  for (int i = 1; i <= 4; ++i) m.description.push_back("y" + std::to_string(i) + " = " + coords->describe_y(i));
  m.forward = [coords](const Point4& x) { return coords->sample(x).y; };
  m.jacobian = [coords](const Point4& x) {
    YSample s = coords->sample(x);
    Mat4 d = zero_mat4();
    for (std::size_t i = 0; i < 4; ++i) d[i][i] = s.dy_dx[i];
    return d;
  };
  return m;
}

Mat4 pushforward_matrix(const MatrixField& m, const CoordMap& map, const Point4& x) {
  Mat4 d = map.jacobian(x);
  if (singular(d)) throw Error("singular map Jacobian at " + format_point(x));
  return congruence(d, m.value(x));
}

Mat4 DarbouxPipeline::transformed(const Point4& x) const {
  Mat4 d = stage2.jacobian(x) * stage1.jacobian(x);
  return congruence(d, field.value(x));
}

DarbouxPipeline DarbouxPipeline::from_maps(const MatrixField& field, const CoordMap& stage1, const CoordMap& stage2,
                                           const BoxDomain& domain) {
  DarbouxPipeline p;
  p.field = field;
  p.stage1 = stage1;
  p.stage2 = stage2;
  p.domain = domain;
  return p;
}

DarbouxPipeline build_pipeline(const FamilyStructure& f, int samples) {
  CaseLabel label = classify(f.sigma);
  FamilyStructure work = label.family == CaseFamily::I ? sigma_positive_normalize(f) : f;
  CasimirPair cas = casimirs_for(f);

  int a = 0, b = 0;
  for (int p = 0; p < 6 && a == 0; ++p) {
    auto [i, j] = pair_at(p);
    if (!work.sigma.is_zero(i, j)) {
      a = i;
      b = j;
    }
  }
  // Stage-2 slots 3 and 4: (C2, C1) for II.A patterns, (C1, C2) otherwise.
  int k3 = label.family == CaseFamily::IIA ? 2 : 1;
  int k4 = 3 - k3;

  DarbouxPipeline p;
  p.label = label;
  p.retained = {a, b};
  p.field = family_field(work);
  p.domain = work.domain;
  p.stage1 = y_map(work, samples);
  p.casimirs = cas;

  auto shared = std::make_shared<const CasimirPair>(cas);
  p.stage2.description = {"u1 = y" + std::to_string(a), "u2 = y" + std::to_string(b),
                          "u3 = C" + std::to_string(k3) + " = " + cas.describe(k3),
                          "u4 = C" + std::to_string(k4) + " = " + cas.describe(k4)};
  p.stage2.forward = [shared, a, b, k3](const Point4& x) {
    CasimirValues v = shared->evaluate(x);
    Vec4 y = shared->coordinates().sample(x).y;
    double c3 = k3 == 1 ? v.c1 : v.c2, c4 = k3 == 1 ? v.c2 : v.c1;
    return Vec4{y[static_cast<std::size_t>(a - 1)], y[static_cast<std::size_t>(b - 1)], c3, c4};
  };
  p.stage2.jacobian = [shared, a, b, k3](const Point4& x) {
    CasimirValues v = shared->evaluate(x);
    Mat4 d = zero_mat4();
    d[0][static_cast<std::size_t>(a - 1)] = 1.0;
    d[1][static_cast<std::size_t>(b - 1)] = 1.0;
    d[2] = k3 == 1 ? v.grad1_y : v.grad2_y;
    d[3] = k3 == 1 ? v.grad2_y : v.grad1_y;
    return d;
  };

  auto [pa, pb] = phi_difference_indices(a, b);
  double s_ab = work.sigma(a, b);
  Expr eta = work.eta;
  UnivariateFn phi_p = work.phi[static_cast<std::size_t>(pa - 1)];
  UnivariateFn phi_q = work.phi[static_cast<std::size_t>(pb - 1)];
  p.closed_form = [s_ab, eta, phi_p, phi_q, pa, pb](const Point4& x) {
    return s_ab * eta.eval(x) * (phi_p(x[static_cast<std::size_t>(pa - 1)]) - phi_q(x[static_cast<std::size_t>(pb - 1)]));
  };
  p.closed_form_expression = build::constant(s_ab) * eta * (phi_p.expr() - phi_q.expr());

  for (const Point4& x : halton_points(work.domain, static_cast<std::size_t>(samples))) {
    if (singular(p.stage1.jacobian(x))) throw Error("stage-1 Jacobian singular at " + format_point(x));
    if (singular(p.stage2.jacobian(x))) {
      throw Error("stage-2 Jacobian singular at " + format_point(x) + " for retained pair (" + std::to_string(a) +
                  "," + std::to_string(b) + ")");
    }
  }
  return p;
}

PipelineReport verify_pipeline(const DarbouxPipeline& p, int n, std::uint64_t seed, Exec exec) {
  struct Row {
    double dev, frozen, gap, eta, det1, det2;
  };
  std::vector<Point4> pts = halton_points(p.domain, static_cast<std::size_t>(n), seed);
  std::vector<Row> rows = map_points<Row>(
      pts,
      [&p](const Point4& x) {
        Mat4 d1 = p.stage1.jacobian(x), d2 = p.stage2.jacobian(x);
        Mat4 t = congruence(d2 * d1, p.field.value(x));
        double eta = t[0][1];
        Row r{};
        r.dev = max_abs(t - eta * p.target);
        for (std::size_t i = 0; i < 4; ++i) {
          for (std::size_t j = 0; j < 4; ++j) {
            if (i >= 2 || j >= 2) r.frozen = std::max(r.frozen, std::fabs(t[i][j]));
          }
        }
        if (p.closed_form) r.gap = std::fabs(eta - p.closed_form(x)) / std::max(1.0, std::fabs(eta));
        r.eta = eta;
        r.det1 = std::fabs(determinant(d1));
        r.det2 = std::fabs(determinant(d2));
        return r;
      },
      exec);
  PipelineReport rep;
  rep.samples = n;
  if (rows.empty()) return rep;
  rep.min_abs_eta_pp = rep.min_abs_det_stage1 = rep.min_abs_det_stage2 = INFINITY;
  double first = rows.front().eta;
  for (const Row& r : rows) {
    rep.max_deviation = std::max(rep.max_deviation, r.dev);
    rep.max_frozen_rows = std::max(rep.max_frozen_rows, r.frozen);
    rep.max_closed_form_gap = std::max(rep.max_closed_form_gap, r.gap);
    rep.min_abs_eta_pp = std::min(rep.min_abs_eta_pp, std::fabs(r.eta));
    rep.max_abs_eta_pp = std::max(rep.max_abs_eta_pp, std::fabs(r.eta));
    if (r.eta == 0.0 || (r.eta > 0.0) != (first > 0.0)) rep.eta_pp_sign_constant = false;
    rep.min_abs_det_stage1 = std::min(rep.min_abs_det_stage1, r.det1);
    rep.min_abs_det_stage2 = std::min(rep.min_abs_det_stage2, r.det2);
  }
  return rep;
}

std::array<Expr, 4> gradient_exprs(const Expr& h) {
  return {differentiate(h, 1), differentiate(h, 2), differentiate(h, 3), differentiate(h, 4)};
}

std::function<Vec4(const Point4&)> reparametrized_vector_field(const MatrixField& m, const Expr& h,
                                                                std::function<double(const Point4&)> mu,
                                                                const BoxDomain& domain, int samples) {
  sign_scan(halton_points(domain, static_cast<std::size_t>(samples)), mu, "time factor mu");
  std::array<Expr, 4> grad = gradient_exprs(h);
  return [value = m.value, grad, mu](const Point4& x) {
    Vec4 g{grad[0].eval(x), grad[1].eval(x), grad[2].eval(x), grad[3].eval(x)};
    Vec4 v = value(x) * g;
    double s = mu(x);
    for (double& c : v) c *= s;
    return v;
  };
}

}  // namespace p4d
