#pragma once

#include <cstddef>
#include <vector>

#include "spl/core/grid.hpp"

namespace spl {

/// Sign-change locations of the limit variable at one time.
struct FreeBoundary {
  std::vector<double> positions;
  double time = 0.0;

  std::size_t count() const noexcept { return positions.size(); }
};

/**
 * @brief Sub-cell zero crossings of u.
 *
 * Adjacent cells of strictly opposite sign contribute the root of the
 * linear interpolant between their centers; cells that are exactly zero
 * contribute their own center.
 */
inline FreeBoundary extract_free_boundary(const Field& u) {
  FreeBoundary fb;
  fb.time = u.time;
  const std::size_t n = u.size();
  const double h = u.grid.dx();
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] == 0.0) fb.positions.push_back(u.grid.center(i));
    if (i + 1 < n && ((u[i] > 0.0 && u[i + 1] < 0.0) || (u[i] < 0.0 && u[i + 1] > 0.0)))
      fb.positions.push_back(u.grid.center(i) + h * u[i] / (u[i] - u[i + 1]));
  }
  return fb;
}

}  // namespace spl
