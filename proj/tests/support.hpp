#pragma once

#include <random>
#include <string>
#include <vector>

#include "poisson4d/structure.hpp"
#include "poisson4d/structure_io.hpp"

namespace p4d::test {

using Rng = std::mt19937_64;

/// sigma_i = (1,2,3,5), eta = psi = 1, phi_i = x_i on (0,1)x(2,3)x(4,5)x(6,7).
FamilyStructure sstar();
/// S* with a single coupling replaced.
FamilyStructure sstar_with(int i, int j, double value);

/// Random structure whose phi ranges are separated by at least 0.5 on the box,
/// psi and eta bounded away from zero. Case I uses sigma_ij = e_i e_j g s_i s_j
/// with s_i in [0.5, 5] and random signs e_i, g when `signs` is set.
FamilyStructure random_case1(Rng& rng, bool signs = true);
/// Random zero pattern: one of the eight triples, optionally losing one or
/// two couplings; nonzero values in [0.5, 5] with random signs.
FamilyStructure random_case2(Rng& rng);
/// Random eta, psi, phi and box for the given couplings.
FamilyStructure random_with_sigma(Rng& rng, const SigmaSet& sigma);
/// One of the two, alternating on `k`.
FamilyStructure random_structure(Rng& rng, int k);

/// Random expression tree over x1..x4 built from the whole grammar.
Expr random_expr(Rng& rng, int depth, unsigned vars = 0xF);

/// Parsed gallery entry.
FamilyStructure gallery_structure(const std::string& name);

double uniform(Rng& rng, double lo, double hi);

}  // namespace p4d::test
