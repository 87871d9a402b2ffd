#include "poisson4d/normal_form.hpp"

#include <cmath>

namespace p4d {

namespace {

SignFlips table_lookup(const SigmaSet& s) {
  int negatives = 0;
  for (double v : s.values) negatives += v < 0.0 ? 1 : 0;
  auto neg = [&](int i, int j) { return s(i, j) < 0.0; };
  SignFlips f;
  auto flip_psi = [&f](int a, int b) {
    f.flip_psi[static_cast<std::size_t>(a - 1)] = true;
    f.flip_psi[static_cast<std::size_t>(b - 1)] = true;
  };

  if (negatives == 0) {
    f.branch = "1";
    return f;
  }
  if (negatives == 6) {
    f.branch = "2";
    f.flip_phi = true;
    return f;
  }
  double sigma = s.product();
  if (sigma > 0.0) {
    if (negatives == 2) {
      f.flip_phi = true;
      if (neg(1, 2) && neg(3, 4)) {
        f.branch = "3.1.1";
        flip_psi(3, 4);
      } else if (neg(1, 3) && neg(2, 4)) {
        f.branch = "3.1.2";
        flip_psi(1, 3);
      } else if (neg(1, 4) && neg(2, 3)) {
        f.branch = "3.1.3";
        flip_psi(1, 4);
      }
    } else if (negatives == 4) {
      if (!neg(1, 2) && !neg(3, 4)) {
        f.branch = "3.2 (step 2 of 3.1.1)";
        flip_psi(3, 4);
      } else if (!neg(1, 3) && !neg(2, 4)) {
        f.branch = "3.2 (step 2 of 3.1.2)";
        flip_psi(1, 3);
      } else if (!neg(1, 4) && !neg(2, 3)) {
        f.branch = "3.2 (step 2 of 3.1.3)";
        flip_psi(1, 4);
      }
    }
    return f;
  }
  // sigma < 0 with sigma_12 < 0
  bool n13 = neg(1, 3), n14 = neg(1, 4);
  if (n13 && n14) {
    f.branch = "4.1";
    f.flip_psi[0] = true;
  } else if (!n13 && !n14) {
    f.branch = "4.2";
    f.flip_psi[1] = true;
  } else if (!n13 && n14) {
    f.branch = "4.3";
    f.flip_psi[2] = true;
    f.flip_phi = true;
  } else {
    f.branch = "4.4";
    f.flip_psi[3] = true;
    f.flip_phi = true;
  }
  return f;
}

bool reproduces_signs(const SigmaSet& s, const SignFlips& f) {
  for (int p = 0; p < 6; ++p) {
    auto [a, b] = pair_at(p);
    double sa = f.flip_psi[static_cast<std::size_t>(a - 1)] ? -1.0 : 1.0;
    double sb = f.flip_psi[static_cast<std::size_t>(b - 1)] ? -1.0 : 1.0;
    double sf = f.flip_phi ? -1.0 : 1.0;
    if ((s.values[static_cast<std::size_t>(p)] > 0.0) != (sa * sb * sf > 0.0)) return false;
  }
  return true;
}

}  // namespace

SignFlips sigma_positive_flips(const SigmaSet& s) {
  for (double v : s.values) {
    if (v == 0.0) throw Error("sigma-positive normalization requires every coupling to be nonzero");
  }
  SignFlips f;
  if (s.product() < 0.0 && s(1, 2) > 0.0) {
    // Relabel 1<->3, 2<->4 (an even permutation) so the negative coupling of
    // the (12, 34) pair sits at (1, 2), look up, and map the flips back.
    static constexpr int kPerm[4] = {3, 4, 1, 2};
    SigmaSet r;
    for (int p = 0; p < 6; ++p) {
      auto [a, b] = pair_at(p);
      r.values[static_cast<std::size_t>(p)] = s(kPerm[a - 1], kPerm[b - 1]);
    }
    SignFlips g = table_lookup(r);
    f.flip_phi = g.flip_phi;
    for (int i = 1; i <= 4; ++i)
      f.flip_psi[static_cast<std::size_t>(kPerm[i - 1] - 1)] = g.flip_psi[static_cast<std::size_t>(i - 1)];
    f.branch = g.branch + " (relabelled 1<->3, 2<->4)";
  } else {
    f = table_lookup(s);
  }
  if (f.branch.empty() || !reproduces_signs(s, f)) {
    throw Error("coupling sign pattern is inconsistent with s12 s34 = s13 s24 = s14 s23");
  }
  return f;
}

FamilyStructure sigma_positive_normalize(const FamilyStructure& f) {
  SignFlips flips = sigma_positive_flips(f.sigma);
  FamilyStructure out = f;
  for (double& v : out.sigma.values) v = std::fabs(v);
  for (std::size_t i = 0; i < 4; ++i) {
    if (flips.flip_phi) out.phi[i] = UnivariateFn(build::neg(f.phi[i].expr()), f.phi[i].var(), f.phi[i].interval());
    if (flips.flip_psi[i]) {
      out.psi[i] = UnivariateFn(build::neg(f.psi[i].expr()), f.psi[i].var(), f.psi[i].interval());
    }
  }
  return out;
}

SigmaFactors factor_sigma(const SigmaSet& s) {
  for (double v : s.values) {
    if (!(v > 0.0)) throw Error("factor_sigma requires all couplings positive, got " + format_number(v));
  }
  if (!check_sigma_compatibility(s).ok) throw Error("factor_sigma: couplings violate compatibility");
  double sigma = s.product();
  double s12 = s(1, 2), s13 = s(1, 3), s14 = s(1, 4);
  SigmaFactors f;
  f.values = {std::sqrt(s12 * s13 * s14 / sigma), std::sqrt(sigma * s12 / (s13 * s14)),
              std::sqrt(sigma * s13 / (s12 * s14)), std::sqrt(sigma * s14 / (s12 * s13))};
  return f;
}

}  // namespace p4d
