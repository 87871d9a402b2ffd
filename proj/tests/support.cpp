#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poisson4d/gallery.hpp"

namespace p4d::test {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

namespace {

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

std::string num(double v) { return format_number(v); }

std::string var(int i) { return "x" + std::to_string(i); }

// g(t) with modest slope on t in [0.5, 3].
std::string random_shape(Rng& rng, int i) {
  double a = uniform(rng, 0.2, 0.6);
  std::string t = var(i);
  switch (pick(rng, 7)) {
    case 0: return num(a) + "*" + t;
    case 1: return num(0.3 * a) + "*" + t + "^2";
    case 2: return num(a) + "*sin(" + t + ")";
    case 3: return num(0.5 * a) + "*exp(0.5*" + t + ")";
    case 4: return num(a) + "*tanh(" + t + ")";
    case 5: return num(a) + "*ln(" + t + ")";
    default: return num(a) + "*sqrt(" + t + ")";
  }
}

std::string random_psi(Rng& rng, int i) {
  double b = uniform(rng, 0.1, 0.4);
  std::string t = var(i), s;
  switch (pick(rng, 5)) {
    case 0: s = "1 + " + num(b) + "*" + t; break;
    case 1: s = "exp(" + num(b) + "*" + t + ")"; break;
    case 2: s = "1 + " + num(0.5 * b) + "*" + t + "^2"; break;
    case 3: s = "2 - " + num(b) + "*sin(" + t + ")"; break;
    default: s = "1"; break;
  }
  if (pick(rng, 4) == 0) s = "-(" + s + ")";
  return s;
}

std::string random_eta(Rng& rng) {
  double c = uniform(rng, 0.05, 0.2);
  switch (pick(rng, 5)) {
    case 0: return "1 + " + num(c) + "*x1*x2";
    case 1: return "exp(" + num(c) + "*(x1 - x3))";
    case 2: return "1 + " + num(c) + "*sin(x1 + x4)";
    case 3: return "2 + " + num(c) + "*cos(x2*x3)";
    default: return "1";
  }
}

}  // namespace

FamilyStructure random_with_sigma(Rng& rng, const SigmaSet& sigma) {
  Point4 lower{}, upper{};
  std::array<std::string, 4> psi, shape;
  for (int i = 1; i <= 4; ++i) {
    auto k = static_cast<std::size_t>(i - 1);
    lower[k] = uniform(rng, 0.5, 2.0);
    upper[k] = lower[k] + 1.0;
    psi[k] = random_psi(rng, i);
    shape[k] = random_shape(rng, i);
  }
  // Offsets stacking the phi ranges in a random order with gaps >= 0.5.
  std::array<int, 4> order{0, 1, 2, 3};
  std::shuffle(order.begin(), order.end(), rng);
  std::array<std::string, 4> phi;
  double top = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    auto k = static_cast<std::size_t>(order[r]);
    Expr g = parse(shape[k]);
    double lo = INFINITY, hi = -INFINITY;
    for (int s = 0; s <= 400; ++s) {
      Point4 x{};
      x[k] = lower[k] + (upper[k] - lower[k]) * s / 400.0;
      double v = g.eval(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    double offset = top + uniform(rng, 0.5, 1.0) - lo;
    phi[k] = num(offset) + " + " + shape[k];
    top = offset + hi;
  }
  return FamilyStructure::parse(sigma, random_eta(rng), psi, phi, BoxDomain::make(lower, upper));
}

FamilyStructure sstar() {
  return FamilyStructure::parse(SigmaSet(2, 3, 5, 6, 10, 15), "1", {"1", "1", "1", "1"}, {"x1", "x2", "x3", "x4"},
                                BoxDomain::make({0, 2, 4, 6}, {1, 3, 5, 7}), "x1 + x2 + x3 + x4");
}

FamilyStructure sstar_with(int i, int j, double value) {
  FamilyStructure f = sstar();
  f.sigma.set(i, j, value);
  return f;
}

FamilyStructure random_case1(Rng& rng, bool signs) {
  std::array<double, 4> s{};
  for (double& v : s) v = uniform(rng, 0.5, 5.0);
  SigmaSet sigma = SigmaSet::from_factors(s);
  if (signs) {
    std::array<double, 4> e{};
    for (double& v : e) v = pick(rng, 2) ? 1.0 : -1.0;
    double g = pick(rng, 2) ? 1.0 : -1.0;
    for (int p = 0; p < 6; ++p) {
      auto [i, j] = pair_at(p);
      sigma.values[static_cast<std::size_t>(p)] *= e[static_cast<std::size_t>(i - 1)] * e[static_cast<std::size_t>(j - 1)] * g;
    }
  }
  return random_with_sigma(rng, sigma);
}

FamilyStructure random_case2(Rng& rng) {
  int pattern = pick(rng, 8);
  std::array<int, 3> pairs = pattern < 4 ? iia_allowed_pairs(pattern + 1) : iib_allowed_pairs(pattern - 3);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  int keep = 3 - pick(rng, 3);  // 3, 2 or 1 couplings
  SigmaSet sigma;
  for (int r = 0; r < keep; ++r) {
    double v = uniform(rng, 0.5, 5.0) * (pick(rng, 2) ? 1.0 : -1.0);
    sigma.values[static_cast<std::size_t>(pairs[static_cast<std::size_t>(r)])] = v;
  }
  return random_with_sigma(rng, sigma);
}

FamilyStructure random_structure(Rng& rng, int k) { return k % 2 == 0 ? random_case1(rng) : random_case2(rng); }

Expr random_expr(Rng& rng, int depth, unsigned vars) {
  std::vector<int> allowed;
  for (int i = 1; i <= 4; ++i)
    if ((vars >> (i - 1)) & 1U) allowed.push_back(i);
  if (depth <= 0 || pick(rng, 4) == 0) {
    if (allowed.empty() || pick(rng, 3) == 0) {
      double v = std::round(uniform(rng, -5.0, 5.0) * 100.0) / 100.0;
      return Expr::constant(v);
    }
    return Expr::variable(allowed[static_cast<std::size_t>(pick(rng, static_cast<int>(allowed.size())))]);
  }
  static constexpr Op kUnary[] = {Op::neg, Op::sin, Op::cos, Op::exp, Op::ln, Op::sqrt, Op::tanh};
  static constexpr Op kBinary[] = {Op::add, Op::sub, Op::mul, Op::div, Op::pow};
  if (pick(rng, 3) == 0) return Expr::unary(kUnary[pick(rng, 7)], random_expr(rng, depth - 1, vars));
  Op op = kBinary[pick(rng, 5)];
  if (op == Op::pow) {
    double e = pick(rng, 2) ? static_cast<double>(pick(rng, 4) + 1) : 0.5 * (pick(rng, 5) + 1);
    return Expr::binary(op, random_expr(rng, depth - 1, vars), Expr::constant(e));
  }
  return Expr::binary(op, random_expr(rng, depth - 1, vars), random_expr(rng, depth - 1, vars));
}

FamilyStructure gallery_structure(const std::string& name) { return gallery_entry(name).build(); }

}  // namespace p4d::test
