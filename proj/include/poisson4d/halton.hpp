#pragma once

#include <cstdint>
#include <vector>

#include "poisson4d/domain.hpp"

namespace p4d {

/// Van der Corput radical inverse of index in the given prime base; lies in
/// (0, 1) for index >= 1.
double radical_inverse(unsigned base, std::uint64_t index);

/// Deterministic Halton points (bases 2, 3, 5, 7) mapped into the open box.
/// Point i uses sequence index i + 1 + seed, so index 0 (the corner) is never
/// produced and different seeds give disjoint windows of one sequence.
std::vector<Point4> halton_points(const BoxDomain& box, std::size_t n, std::uint64_t seed = 0);

}  // namespace p4d
