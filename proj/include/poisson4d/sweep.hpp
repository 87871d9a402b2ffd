#pragma once

// Data-parallel sweeps over sample points.
//
// Every verification in the library is a pure function evaluated at many
// independent points followed by a reduction. The parallel path runs the map
// under OpenMP; the serial path is the reference it is tested against. Both
// write results into a pre-sized vector by index and reduce serially, so the
// two paths return bit-identical results.

#include <algorithm>
#include <exception>
#include <limits>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "poisson4d/expr.hpp"

namespace p4d {

enum class Exec { serial, parallel };

/// Process-wide default used by the library's verification routines.
Exec default_exec() noexcept;
void set_default_exec(Exec exec) noexcept;

namespace detail {

template <class T, class Fn>
std::vector<T> map_serial(std::span<const Point4> pts, Fn& fn) {
  std::vector<T> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = fn(pts[i]);
  return out;
}

template <class T, class Fn>
std::vector<T> map_parallel(std::span<const Point4> pts, Fn& fn) {
  std::vector<T> out(pts.size());
  std::exception_ptr first_error;
  const auto n = static_cast<long>(pts.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(pts[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(p4d_sweep_error)
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace detail

/// out[i] = fn(pts[i]). Exceptions thrown by fn propagate (the first one
/// captured, for the parallel path).
template <class T, class Fn>
std::vector<T> map_points(std::span<const Point4> pts, Fn&& fn, Exec exec = default_exec()) {
  if (exec == Exec::serial) return detail::map_serial<T>(pts, fn);
  return detail::map_parallel<T>(pts, fn);
}

/// max_i fn(pts[i]); 0 for an empty span.
template <class Fn>
double max_over(std::span<const Point4> pts, Fn&& fn, Exec exec = default_exec()) {
  std::vector<double> v = map_points<double>(pts, fn, exec);
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

/// min_i fn(pts[i]); +inf for an empty span.
template <class Fn>
double min_over(std::span<const Point4> pts, Fn&& fn, Exec exec = default_exec()) {
  std::vector<double> v = map_points<double>(pts, fn, exec);
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

int max_threads() noexcept;

}  // namespace p4d
