#include "poisson4d/halton.hpp"

namespace p4d {

double radical_inverse(unsigned base, std::uint64_t index) {
  const double inv_base = 1.0 / static_cast<double>(base);
  double inv = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * inv;
    index /= base;
    inv *= inv_base;
  }
  return result;
}

std::vector<Point4> halton_points(const BoxDomain& box, std::size_t n, std::uint64_t seed) {
  static constexpr unsigned kPrimes[4] = {2, 3, 5, 7};
  std::vector<Point4> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t index = static_cast<std::uint64_t>(i) + 1 + seed;
    for (std::size_t d = 0; d < 4; ++d) {
      double u = radical_inverse(kPrimes[d], index);
      pts[i][d] = box.lower[d] + u * (box.upper[d] - box.lower[d]);
    }
  }
  return pts;
}

}  // namespace p4d
