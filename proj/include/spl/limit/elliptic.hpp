#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"
#include "spl/core/model.hpp"
#include "spl/core/stencil.hpp"

namespace spl {

struct EllipticSolveInfo {
  int iterations = 0;
  double residual = 0.0;
};

/**
 * @brief Solve -L w = G(w) + f on a grid by Newton's method.
 *
 * The Jacobian -L - G'(w) is an M-matrix because G' <= 0, so every Newton
 * iterate is a single tridiagonal solve; the affine law converges in one
 * iteration. `forcing` may be empty (f = 0). The residual is measured row by
 * row relative to the diagonal of -L, which keeps the tolerance independent
 * of the mesh width.
 */
inline Field solve_semilinear(const Grid& grid, const BoundaryConditions& bc, const GrowthLaw& growth,
                              const std::vector<double>& forcing = {}, EllipticSolveInfo* info = nullptr,
                              double tolerance = 1e-12, int max_iterations = 50) {
  const DiffusionStencil st(grid, bc);
  const Tridiagonal lap = st.matrix();
  const auto affine = st.affine();
  const std::size_t n = grid.size();
  std::vector<double> w(n, 0.0);

  auto residual = [&](const std::vector<double>& v) {
    auto lv = lap.apply(v);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = forcing.empty() ? 0.0 : forcing[i];
      r[i] = (-(lv[i] + affine[i]) - growth(v[i]) - f) / (1.0 - lap.diag[i]);
    }
    return r;
  };

  auto r = residual(w);
  double norm = sup_norm(r);
  int it = 0;
  for (; it < max_iterations && norm > tolerance; ++it) {
    Tridiagonal jac(n);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = 1.0 - lap.diag[i];
      jac.diag[i] = -lap.diag[i] - growth.derivative(w[i]);
      jac.lower[i] = -lap.lower[i];
      jac.upper[i] = -lap.upper[i];
      rhs[i] = -r[i] * scale;
    }
    const auto delta = jac.solve(rhs);
    for (std::size_t i = 0; i < n; ++i) w[i] += delta[i];
    r = residual(w);
    norm = sup_norm(r);
    if (!std::isfinite(norm)) break;
  }
  if (info) *info = {it, norm};
  if (!(norm <= tolerance)) throw ProjectionFailure("elliptic Newton did not converge", norm);
  return Field(grid, std::move(w));
}

/// Maximal runs [first, last] of cells where `mask` holds.
template <class Pred>
std::vector<std::pair<std::size_t, std::size_t>> cell_runs(std::size_t n, Pred&& mask) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < n) {
    if (!mask(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && mask(j + 1)) ++j;
    runs.emplace_back(i, j);
    i = j + 1;
  }
  return runs;
}

/// Sub-mesh covering cells [first, last] of `g` with identical spacing.
inline Grid subgrid(const Grid& g, std::size_t first, std::size_t last) {
  return Grid(g.geometry(), g.dimension(), g.face(first), g.face(last + 1), last - first + 1);
}

/**
 * @brief Pressure of each component of a saturated set.
 *
 * For every maximal run of cells where `saturated` holds, solves
 * -Delta w = G(w) with w = 0 on the run's boundary faces (the radial
 * origin is a symmetry face) and writes w into the returned vector;
 * cells outside the set are 0.
 */
template <class Pred>
std::vector<double> elliptic_pressure_on(const Grid& grid, const GrowthLaw& growth, Pred&& saturated) {
  std::vector<double> w(grid.size(), 0.0);
  for (auto [a, b] : cell_runs(grid.size(), saturated)) {
    const Grid sub = subgrid(grid, a, b);
    const Field piece = solve_semilinear(sub, BoundaryConditions::both(Boundary::dirichlet(0.0)), growth);
    for (std::size_t i = a; i <= b; ++i) w[i] = piece[i - a];
  }
  return w;
}

}  // namespace spl
