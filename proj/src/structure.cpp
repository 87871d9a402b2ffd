#include "poisson4d/structure.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "poisson4d/halton.hpp"

namespace p4d {

int pair_index(int i, int j) {
  if (i == j || i < 1 || j < 1 || i > 4 || j > 4) {
    throw Error("invalid index pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  if (i > j) std::swap(i, j);
  static constexpr int kTable[4][5] = {{-1, -1, 0, 1, 2}, {-1, -1, -1, 3, 4}, {-1, -1, -1, -1, 5}, {}};
  return kTable[i - 1][j];
}

std::array<int, 2> pair_at(int index) {
  static constexpr std::array<std::array<int, 2>, 6> kPairs = {
      {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};
  return kPairs.at(static_cast<std::size_t>(index));
}

SigmaSet SigmaSet::from_factors(const std::array<double, 4>& f) {
  return {f[0] * f[1], f[0] * f[2], f[0] * f[3], f[1] * f[2], f[1] * f[3], f[2] * f[3]};
}

double SigmaSet::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

bool SigmaSet::any_nonzero() const noexcept {
  return std::any_of(values.begin(), values.end(), [](double v) { return v != 0.0; });
}

bool SigmaSet::is_zero(int i, int j) const { return std::fabs((*this)(i, j)) <= 1e-12 * max_abs(); }

SigmaSet SigmaSet::scaled(double s) const {
  SigmaSet r = *this;
  for (double& v : r.values) v *= s;
  return r;
}

CompatibilityResult check_sigma_compatibility(const SigmaSet& s) {
  CompatibilityResult r;
  r.sigma = s(1, 2) * s(3, 4);
  r.residual_13_24 = std::fabs(r.sigma - s(1, 3) * s(2, 4));
  r.residual_14_23 = std::fabs(r.sigma - s(1, 4) * s(2, 3));
  double tol = 1e-12 * std::max(1.0, std::fabs(r.sigma));
  r.ok = r.residual_13_24 <= tol && r.residual_14_23 <= tol;
  return r;
}

FamilyStructure FamilyStructure::make(const SigmaSet& sigma, const Expr& eta, const std::array<Expr, 4>& psi,
                                      const std::array<Expr, 4>& phi, const BoxDomain& domain,
                                      std::optional<Expr> hamiltonian) {
  BoxDomain box = BoxDomain::make(domain.lower, domain.upper);
  FamilyStructure f;
  f.sigma = sigma;
  f.eta = eta;
  f.domain = box;
  for (int i = 1; i <= 4; ++i) {
    auto k = static_cast<std::size_t>(i - 1);
    f.psi[k] = UnivariateFn(psi[k], i, box.axis(i));
    f.phi[k] = UnivariateFn(phi[k], i, box.axis(i));
  }
  f.hamiltonian = std::move(hamiltonian);
  return f;
}

FamilyStructure FamilyStructure::parse(const SigmaSet& sigma, const std::string& eta,
                                       const std::array<std::string, 4>& psi, const std::array<std::string, 4>& phi,
                                       const BoxDomain& domain, const std::string& hamiltonian) {
  std::array<Expr, 4> ps, ph;
  for (std::size_t i = 0; i < 4; ++i) {
    ps[i] = p4d::parse(psi[i]);
    ph[i] = p4d::parse(phi[i]);
  }
  std::optional<Expr> h;
  if (!hamiltonian.empty()) h = p4d::parse(hamiltonian);
  return make(sigma, p4d::parse(eta), ps, ph, domain, std::move(h));
}

std::array<int, 2> phi_difference_indices(int i, int j) {
  static constexpr std::array<std::array<int, 2>, 6> kDiff = {{{4, 3}, {2, 4}, {3, 2}, {4, 1}, {1, 3}, {2, 1}}};
  return kDiff[static_cast<std::size_t>(pair_index(i, j))];
}

int levi_civita(int i, int j, int k, int l) {
  std::array<int, 4> p{i, j, k, l};
  for (int v : p)
    if (v < 1 || v > 4) return 0;
  int sign = 1;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b) {
      if (p[a] == p[b]) return 0;
      if (p[a] > p[b]) sign = -sign;
    }
  return sign;
}

namespace {

struct PointValues {
  double eta;
  Vec4 deta;
  Vec4 psi, dpsi, phi, dphi;
};

// Expressions and their derivatives, shared by the matrix evaluators.
struct FamilyKernel {
  SigmaSet sigma;
  Expr eta;
  std::array<Expr, 4> deta, psi, dpsi, phi, dphi;

  explicit FamilyKernel(const FamilyStructure& f) : sigma(f.sigma), eta(f.eta) {
    for (int l = 1; l <= 4; ++l) {
      auto k = static_cast<std::size_t>(l - 1);
      deta[k] = differentiate(f.eta, l);
      psi[k] = f.psi[k].expr();
      dpsi[k] = differentiate(psi[k], l);
      phi[k] = f.phi[k].expr();
      dphi[k] = differentiate(phi[k], l);
    }
  }

  PointValues values(const Point4& x, bool with_derivatives) const {
    PointValues v{};
    v.eta = eta.eval(x);
    for (std::size_t k = 0; k < 4; ++k) {
      v.psi[k] = psi[k].eval(x);
      v.phi[k] = phi[k].eval(x);
      if (with_derivatives) {
        v.deta[k] = deta[k].eval(x);
        v.dpsi[k] = dpsi[k].eval(x);
        v.dphi[k] = dphi[k].eval(x);
      }
    }
    return v;
  }

  Mat4 matrix(const PointValues& v) const {
    Mat4 j{};
    for (int p = 0; p < 6; ++p) {
      auto [a, b] = pair_at(p);
      auto [da, db] = phi_difference_indices(a, b);
      auto ia = static_cast<std::size_t>(a - 1), ib = static_cast<std::size_t>(b - 1);
      double entry = sigma.values[static_cast<std::size_t>(p)] * v.eta * v.psi[ia] * v.psi[ib] *
                     (v.phi[static_cast<std::size_t>(da - 1)] - v.phi[static_cast<std::size_t>(db - 1)]);
      j[ia][ib] = entry;
      j[ib][ia] = -entry;
    }
    return j;
  }

  MatDeriv4 derivative(const PointValues& v) const {
    MatDeriv4 d{};
    for (int p = 0; p < 6; ++p) {
      auto [a, b] = pair_at(p);
      auto [pa, pb] = phi_difference_indices(a, b);
      auto ia = static_cast<std::size_t>(a - 1), ib = static_cast<std::size_t>(b - 1);
      auto ja = static_cast<std::size_t>(pa - 1), jb = static_cast<std::size_t>(pb - 1);
      double s = sigma.values[static_cast<std::size_t>(p)];
      double diff = v.phi[ja] - v.phi[jb];
      double pp = v.psi[ia] * v.psi[ib];
      for (std::size_t l = 0; l < 4; ++l) {
        double dpp = (l == ia ? v.dpsi[ia] * v.psi[ib] : 0.0) + (l == ib ? v.psi[ia] * v.dpsi[ib] : 0.0);
        double ddiff = (l == ja ? v.dphi[ja] : 0.0) - (l == jb ? v.dphi[jb] : 0.0);
        double entry = s * (v.deta[l] * pp * diff + v.eta * dpp * diff + v.eta * pp * ddiff);
        d[l][ia][ib] = entry;
        d[l][ib][ia] = -entry;
      }
    }
    return d;
  }
};

}  // namespace

Mat4 evaluate_matrix(const FamilyStructure& f, const Point4& x) {
  if (!f.domain.contains(x)) throw Error("point " + format_point(x) + " outside the structure domain");
  FamilyKernel k(f);
  return k.matrix(k.values(x, false));
}

Mat4 evaluate_matrix_levi_civita(const FamilyStructure& f, const Point4& x) {
  double eta = f.eta.eval(x);
  Vec4 psi{}, phi{};
  for (std::size_t i = 0; i < 4; ++i) {
    psi[i] = f.psi[i](x[i]);
    phi[i] = f.phi[i](x[i]);
  }
  Mat4 j{};
  for (int a = 1; a <= 4; ++a)
    for (int b = 1; b <= 4; ++b) {
      if (a == b) continue;
      double sum = 0.0;
      for (int k = 1; k <= 4; ++k)
        for (int l = 1; l <= 4; ++l) sum += levi_civita(a, b, k, l) * phi[static_cast<std::size_t>(l - 1)];
      j[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] =
          f.sigma(a, b) * eta * psi[static_cast<std::size_t>(a - 1)] * psi[static_cast<std::size_t>(b - 1)] * sum;
    }
  return j;
}

MatrixField family_field(const FamilyStructure& f) {
  auto kernel = std::make_shared<const FamilyKernel>(f);
  MatrixField m;
  m.value = [kernel](const Point4& x) { return kernel->matrix(kernel->values(x, false)); };
  m.derivative = [kernel](const Point4& x) { return kernel->derivative(kernel->values(x, true)); };
  return m;
}

MatrixField expression_field(const std::array<std::array<Expr, 4>, 4>& upper) {
  struct Entries {
    std::array<std::array<Expr, 4>, 4> e;
    std::array<std::array<std::array<Expr, 4>, 4>, 4> de;  // [l][i][j]
  };
  auto entries = std::make_shared<Entries>();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      entries->e[i][j] = upper[i][j];
      for (int l = 1; l <= 4; ++l) entries->de[static_cast<std::size_t>(l - 1)][i][j] = differentiate(upper[i][j], l);
    }
  MatrixField m;
  m.value = [entries](const Point4& x) {
    Mat4 r{};
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) {
        r[i][j] = entries->e[i][j].eval(x);
        r[j][i] = -r[i][j];
      }
    return r;
  };
  m.derivative = [entries](const Point4& x) {
    MatDeriv4 d{};
    for (std::size_t l = 0; l < 4; ++l)
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
          d[l][i][j] = entries->de[l][i][j].eval(x);
          d[l][j][i] = -d[l][i][j];
        }
    return d;
  };
  return m;
}

MatrixField finite_difference_field(std::function<Mat4(const Point4&)> value) {
  MatrixField m;
  m.value = value;
  m.derivative = [value](const Point4& x) {
    MatDeriv4 d{};
    for (std::size_t l = 0; l < 4; ++l) {
      double h = 1e-6 * (1.0 + std::fabs(x[l]));
      Point4 xp = x, xm = x;
      xp[l] += h;
      xm[l] -= h;
      Mat4 jp = value(xp), jm = value(xm);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) d[l][i][j] = (jp[i][j] - jm[i][j]) / (xp[l] - xm[l]);
    }
    return d;
  };
  return m;
}

MatrixField constant_field(const Mat4& c) {
  MatrixField m;
  m.value = [c](const Point4&) { return c; };
  m.derivative = [](const Point4&) { return MatDeriv4{}; };
  return m;
}

double jacobi_residual(const MatrixField& m, const Point4& x) {
  Mat4 j = m.value(x);
  MatDeriv4 d = m.derivative(x);
  static constexpr std::size_t kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  double worst = 0.0;
  for (const auto& t : kTriples) {
    std::size_t a = t[0], b = t[1], c = t[2];
    double sum = 0.0;
    for (std::size_t l = 0; l < 4; ++l) sum += j[a][l] * d[l][b][c] + j[c][l] * d[l][a][b] + j[b][l] * d[l][c][a];
    worst = std::max(worst, std::fabs(sum));
  }
  return worst;
}

double max_jacobi_residual(const MatrixField& m, std::span<const Point4> pts, Exec exec) {
  return max_over(pts, [&m](const Point4& x) { return jacobi_residual(m, x); }, exec);
}

// ---------------------------------------------------------------------------

HypothesisReport check_hypotheses(const FamilyStructure& f, int n_samples, std::uint64_t seed, Exec exec) {
  if (n_samples < 1) throw Error("check_hypotheses needs at least one sample");
  struct Sample {
    double eta = 0.0;
    Vec4 psi{};
    std::array<double, 6> diff{};
    std::string fault;
  };
  auto pts = halton_points(f.domain, static_cast<std::size_t>(n_samples), seed);
  auto samples = map_points<Sample>(
      pts,
      [&f](const Point4& x) {
        Sample s;
        try {
          s.eta = f.eta.eval(x);
          Vec4 phi{};
          for (std::size_t i = 0; i < 4; ++i) {
            s.psi[i] = f.psi[i](x[i]);
            phi[i] = f.phi[i](x[i]);
          }
          for (int p = 0; p < 6; ++p) {
            auto [a, b] = pair_at(p);
            s.diff[static_cast<std::size_t>(p)] =
                phi[static_cast<std::size_t>(a - 1)] - phi[static_cast<std::size_t>(b - 1)];
          }
          if (f.hamiltonian) (void)f.hamiltonian->eval(x);
        } catch (const EvalError& e) {
          s.fault = e.what();
        }
        return s;
      },
      exec);

  HypothesisReport r;
  r.samples = n_samples;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  r.min_abs_eta = kInf;
  r.min_abs_psi.fill(kInf);
  r.min_abs_phi_diff.fill(kInf);
  r.psi_sign_constant.fill(true);
  r.phi_diff_sign_constant.fill(true);

  auto track_sign = [](double v, int& seen, bool& constant) {
    int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) {
      constant = false;
      return;
    }
    if (seen == 0) seen = s;
    if (s != seen) constant = false;
  };
  int eta_seen = 0;
  std::array<int, 4> psi_seen{};
  std::array<int, 6> diff_seen{};
  std::size_t faults = 0;
  std::string first_fault;
  for (const Sample& s : samples) {
    if (!s.fault.empty()) {
      if (faults++ == 0) first_fault = s.fault;
      continue;
    }
    r.min_abs_eta = std::min(r.min_abs_eta, std::fabs(s.eta));
    track_sign(s.eta, eta_seen, r.eta_sign_constant);
    for (std::size_t i = 0; i < 4; ++i) {
      r.min_abs_psi[i] = std::min(r.min_abs_psi[i], std::fabs(s.psi[i]));
      track_sign(s.psi[i], psi_seen[i], r.psi_sign_constant[i]);
    }
    for (std::size_t p = 0; p < 6; ++p) {
      r.min_abs_phi_diff[p] = std::min(r.min_abs_phi_diff[p], std::fabs(s.diff[p]));
      track_sign(s.diff[p], diff_seen[p], r.phi_diff_sign_constant[p]);
    }
  }

  constexpr double kFloor = 1e-9;
  if (faults > 0) {
    r.flags.push_back("evaluation fault at " + std::to_string(faults) + " of " + std::to_string(n_samples) +
                      " samples: " + first_fault);
  }
  if (r.min_abs_eta < kFloor) r.flags.push_back("eta nearly vanishes: min |eta| = " + format_number(r.min_abs_eta));
  if (!r.eta_sign_constant) r.flags.push_back("eta: sign change detected");
  for (std::size_t i = 0; i < 4; ++i) {
    std::string name = "psi" + std::to_string(i + 1);
    if (r.min_abs_psi[i] < kFloor) r.flags.push_back(name + " nearly vanishes: min = " + format_number(r.min_abs_psi[i]));
    if (!r.psi_sign_constant[i]) r.flags.push_back(name + ": sign change detected");
  }
  for (int p = 0; p < 6; ++p) {
    auto [a, b] = pair_at(p);
    std::string name = "phi" + std::to_string(a) + " - phi" + std::to_string(b);
    auto k = static_cast<std::size_t>(p);
    if (r.min_abs_phi_diff[k] < kFloor) {
      r.flags.push_back(name + " nearly vanishes: min = " + format_number(r.min_abs_phi_diff[k]));
    }
    if (!r.phi_diff_sign_constant[k]) r.flags.push_back(name + ": sign change detected");
  }
  return r;
}

RankInfo rank_and_determinant(const Mat4& j) {
  RankInfo r;
  r.det = determinant(j);
  r.pfaffian = pfaffian(j);
  r.singular_values = singular_values(j);
  double threshold = 1e-9 * std::max(1.0, r.singular_values[0]);
  r.rank = static_cast<int>(
      std::count_if(r.singular_values.begin(), r.singular_values.end(), [&](double s) { return s > threshold; }));
  return r;
}

double bracket_obstruction(const Mat4& j) {
  std::array<std::size_t, 4> p{0, 1, 2, 3};
  double worst = 0.0;
  do {
    std::size_t i = p[0], jj = p[1], k = p[2], m = p[3];
    double v = j[i][m] * j[jj][k] + j[k][m] * j[i][jj] + j[jj][m] * j[k][i];
    worst = std::max(worst, std::fabs(v));
  } while (std::next_permutation(p.begin(), p.end()));
  return worst;
}

// ---------------------------------------------------------------------------

std::array<int, 3> iia_allowed_pairs(int m) {
  static constexpr std::array<std::array<int, 3>, 4> kA = {{{0, 1, 3}, {3, 4, 5}, {1, 2, 5}, {0, 2, 4}}};
  return kA.at(static_cast<std::size_t>(m - 1));
}

std::array<int, 3> iib_allowed_pairs(int k) {
  static constexpr std::array<std::array<int, 3>, 4> kB = {{{0, 3, 4}, {2, 4, 5}, {1, 3, 5}, {0, 1, 2}}};
  return kB.at(static_cast<std::size_t>(k - 1));
}

std::string CaseLabel::str() const {
  switch (family) {
    case CaseFamily::I:
      return "I";
    case CaseFamily::IIA:
      return "IIA." + std::to_string(index) + (generic ? "" : ".nongeneric");
    case CaseFamily::IIB:
      return "IIB." + std::to_string(index) + (generic ? ".generic" : ".nongeneric");
  }
  return "?";
}

CaseLabel classify(const SigmaSet& s) {
  if (!s.any_nonzero()) throw Error("all couplings sigma_ij vanish");
  auto compat = check_sigma_compatibility(s);
  if (!compat.ok) {
    throw Error("couplings violate s12 s34 = s13 s24 = s14 s23 (residuals " +
                format_number(compat.residual_13_24) + ", " + format_number(compat.residual_14_23) + ")");
  }
  unsigned nonzero = 0;
  int count = 0;
  for (int p = 0; p < 6; ++p) {
    auto [a, b] = pair_at(p);
    if (!s.is_zero(a, b)) {
      nonzero |= 1U << p;
      ++count;
    }
  }
  if (count == 6) return {CaseFamily::I, 0, true, 6};
  auto mask_of = [](const std::array<int, 3>& pairs) {
    unsigned m = 0;
    for (int p : pairs) m |= 1U << p;
    return m;
  };
  for (int m = 1; m <= 4; ++m) {
    unsigned allowed = mask_of(iia_allowed_pairs(m));
    if ((nonzero & ~allowed) == 0U) return {CaseFamily::IIA, m, nonzero == allowed, count};
  }
  for (int k = 1; k <= 4; ++k) {
    unsigned allowed = mask_of(iib_allowed_pairs(k));
    if ((nonzero & ~allowed) == 0U) return {CaseFamily::IIB, k, nonzero == allowed, count};
  }
  throw Error("nonzero coupling pattern matches no case of the classification");
}

}  // namespace p4d
