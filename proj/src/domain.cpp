#include "poisson4d/domain.hpp"

#include <cmath>

namespace p4d {

BoxDomain BoxDomain::make(const Point4& lower, const Point4& upper) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i])) {
      throw Error("domain axis x" + std::to_string(i + 1) + " is empty: [" + format_number(lower[i]) + ", " +
                  format_number(upper[i]) + "]");
    }
  }
  return BoxDomain{lower, upper};
}

Point4 BoxDomain::midpoint() const noexcept {
  Point4 m{};
  for (std::size_t i = 0; i < 4; ++i) m[i] = 0.5 * (lower[i] + upper[i]);
  return m;
}

bool BoxDomain::contains(const Point4& x) const noexcept {
  for (std::size_t i = 0; i < 4; ++i)
    if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
  return true;
}

}  // namespace p4d
