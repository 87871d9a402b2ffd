#pragma once

#include <array>

#include "poisson4d/expr.hpp"

namespace p4d {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double mid() const noexcept { return 0.5 * (lo + hi); }
  double width() const noexcept { return hi - lo; }
  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
  bool contains_open(double t) const noexcept { return t > lo && t < hi; }
};

/// Axis-aligned open box in R^4.
struct BoxDomain {
  Point4 lower{0.0, 0.0, 0.0, 0.0};
  Point4 upper{1.0, 1.0, 1.0, 1.0};

  /// Throws p4d::Error unless lower_i < upper_i for every axis.
  static BoxDomain make(const Point4& lower, const Point4& upper);

  /// Axis 1..4.
  Interval axis(int index) const noexcept {
    auto i = static_cast<std::size_t>(index - 1);
    return {lower[i], upper[i]};
  }
  Point4 midpoint() const noexcept;
  bool contains(const Point4& x) const noexcept;
};

}  // namespace p4d
