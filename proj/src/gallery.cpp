#include "poisson4d/gallery.hpp"

namespace p4d {

namespace {

StructureDefinition entry(std::string name, std::string description, SigmaSet sigma, std::string eta,
                          std::array<std::string, 4> psi, std::array<std::string, 4> phi,
                          std::array<double, 4> lower, std::array<double, 4> upper, std::string hamiltonian) {
  StructureDefinition d;
  d.name = std::move(name);
  d.description = std::move(description);
  d.sigma = sigma;
  d.eta = std::move(eta);
  d.psi = std::move(psi);
  d.phi = std::move(phi);
  d.lower = lower;
  d.upper = upper;
  d.hamiltonian = std::move(hamiltonian);
  return d;
}

StructureDefinition leaf_entry(StructureDefinition d, double leaf) {
  d.leaf_limit = true;
  d.leaf = leaf;
  return d;
}

std::vector<StructureDefinition> make_gallery() {
  const std::array<std::string, 4> ones{"1", "1", "1", "1"};
  const std::array<std::string, 4> ident{"x1", "x2", "x3", "x4"};
  const std::array<double, 4> lo{0, 2, 4, 6}, hi{1, 3, 5, 7};
  std::vector<StructureDefinition> g;
  g.push_back(entry("sstar", "Case I, linear phi, factors (1,2,3,5)", SigmaSet(2, 3, 5, 6, 10, 15), "1", ones,
                    ident, lo, hi, "x1 + x2 + x3 + x4"));
  g.push_back(entry("sstar-orbit", "sstar on a box containing the whole orbit through (0.5,2.5,4.5,6.5)",
                    SigmaSet(2, 3, 5, 6, 10, 15), "1", ones, ident, {0, 1.5, 3.05, 6}, {1, 3, 5, 8},
                    "x1 + x2 + x3 + x4"));
  g.push_back(entry("case1-mixed", "Case I with mixed coupling signs, nonconstant eta and psi",
                    SigmaSet(-2, 3, 5, 6, 10, -15), "1 + 0.1*x1*x2", {"x1", "1 + x2^2", "2", "sqrt(x4)"},
                    {"x1^2", "5 + sin(x2)", "7 + exp(x3)", "12 + ln(x4)"}, {1, 0, 0, 1}, {2, 1, 1, 2},
                    "x1 + x2 + x3 + x4"));
  g.push_back(entry("iia1", "pattern II.A.1, s14 = s24 = s34 = 0", SigmaSet(1, 1, 0, 1, 0, 0), "1", ones, ident,
                    lo, hi, "x1 + x2 + x3 + x4"));
  g.push_back(entry("iib1-generic", "pattern II.B.1, s13 = s14 = s34 = 0", SigmaSet(1, 0, 0, 2, 3, 0), "1", ones,
                    ident, lo, hi, "x1 + x2 + x3 + x4"));
  g.push_back(entry("iib1-absorbed", "II.B.1 with s24 = 0, absorbed by II.A.1", SigmaSet(1, 0, 0, 2, 0, 0), "1",
                    ones, ident, lo, hi, "x1 + x2 + x3 + x4"));
  g.push_back(entry("single-pair", "only s12 nonzero; x3 and x4 are Casimirs", SigmaSet(1, 0, 0, 0, 0, 0), "1",
                    ones, ident, lo, hi, "x1 + x2 + x3 + x4"));
  g.push_back(entry("separable", "constant eta and phi: J_ij = a_ij psi_i psi_j", SigmaSet(1, 1, 1, 1, 1, 1), "1",
                    {"1 + x1^2", "exp(x2)", "2 + x3", "1 / x4"}, {"0", "1", "2", "4"}, {0, 0, 0, 1}, {1, 1, 1, 2},
                    "x1 + x2 + x3 + x4"));
  g.push_back(leaf_entry(entry("euler-top-3d", "leaf limit giving J12 = x3, J13 = -x2, J23 = x1",
                               SigmaSet(1, 1, 1, 1, 1, 1), "1", {"1", "1", "1", "0"}, {"x1", "x2", "x3", "0"},
                               {-1, -1, -1, 1}, {1, 1, 1, 3}, "0.5*x1^2 + 0.25*x2^2 + 0.125*x3^2"),
                         2.0));
  g.push_back(leaf_entry(entry("lotka-volterra-3d", "leaf limit with psi_i = x_i and constant phi",
                               SigmaSet(1, 1, 1, 1, 1, 1), "1", {"x1", "x2", "x3", "0"}, {"1", "2", "3", "0"},
                               {0.5, 0.5, 0.5, 0}, {2, 2, 2, 1}, "x1 + x2 + x3 - ln(x1) - ln(x2) - ln(x3)"),
                         0.5));
  g.push_back(leaf_entry(entry("kermack-mckendrick-3d",
                               "leaf limit with J12 = -x1 x2, J13 = 0, J23 = -0.3 x2; H = x1 + x2 + x3 gives SIR flow",
                               SigmaSet(1, 1, 1, 1, 1, 1), "1", {"x1", "x2", "1", "0"}, {"-0.3", "0", "-1", "0"},
                               {0.1, 0.1, 0.1, 0}, {1, 1, 1, 1}, "x1 + x2 + x3"),
                         0.5));
  return g;
}

}  // namespace

const std::vector<StructureDefinition>& gallery() {
  static const std::vector<StructureDefinition> g = make_gallery();
  return g;
}

const StructureDefinition& gallery_entry(const std::string& name) {
  for (const StructureDefinition& d : gallery()) {
    if (d.name == name) return d;
  }
  throw Error("unknown gallery entry '" + name + "'");
}

}  // namespace p4d
