#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "spl/core/grid.hpp"
#include "spl/core/tridiagonal.hpp"

namespace spl {

/// Boundary data for one end of a 1D mesh. Dirichlet values live on the face;
/// Neumann values are the outward normal derivative.
struct Boundary {
  enum class Kind { dirichlet, neumann };
  Kind kind = Kind::neumann;
  double value = 0.0;

  static Boundary dirichlet(double v) { return {Kind::dirichlet, v}; }
  static Boundary neumann(double g = 0.0) { return {Kind::neumann, g}; }
  static Boundary zero_flux() { return {Kind::neumann, 0.0}; }

  bool is_dirichlet() const noexcept { return kind == Kind::dirichlet; }
  friend bool operator==(const Boundary&, const Boundary&) = default;
};

struct BoundaryConditions {
  Boundary left = Boundary::zero_flux();
  Boundary right = Boundary::zero_flux();

  static BoundaryConditions both(Boundary b) { return {b, b}; }
  friend bool operator==(const BoundaryConditions&, const BoundaryConditions&) = default;
};

/// The radial origin is always a symmetry face.
inline BoundaryConditions effective(const Grid& g, BoundaryConditions bc) {
  if (g.has_origin()) bc.left = Boundary::zero_flux();
  return bc;
}

/**
 * @brief Conservative finite-volume Laplacian on a Grid.
 *
 * (L u)_i = [A_{i+1/2} (du/dx)_{i+1/2} - A_{i-1/2} (du/dx)_{i-1/2}] / V_i.
 * Interior face gradients are centered differences; a Dirichlet face uses
 * the half-cell distance to the boundary value. The boundary values enter
 * through an affine term so the same coefficients serve linear solves,
 * Newton Jacobians, and nonlinear fluxes such as those of rho^m + nu rho.
 */
class DiffusionStencil {
public:
  DiffusionStencil(const Grid& grid, BoundaryConditions bc) : grid_(grid), bc_(effective(grid, bc)) {
    const std::size_t n = grid.size();
    const double h = grid.dx();
    west_.assign(n, 0.0);
    east_.assign(n, 0.0);
    inv_volume_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = grid.cell_volume(i);
      inv_volume_[i] = 1.0 / v;
      if (i > 0) west_[i] = grid.face_area(i) / (v * h);
      if (i + 1 < n) east_[i] = grid.face_area(i + 1) / (v * h);
    }
    if (bc_.left.is_dirichlet()) west_[0] = 2.0 * grid.face_area(0) / (grid.cell_volume(0) * h);
    if (bc_.right.is_dirichlet())
      east_[n - 1] = 2.0 * grid.face_area(n) / (grid.cell_volume(n - 1) * h);
  }

  const Grid& grid() const noexcept { return grid_; }
  const BoundaryConditions& boundary() const noexcept { return bc_; }
  std::size_t size() const noexcept { return west_.size(); }

  /// Sum of off-diagonal weights of row i; bounds the explicit stability limit.
  double row_weight(std::size_t i) const noexcept { return west_[i] + east_[i]; }
  double max_row_weight() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m = std::max(m, row_weight(i));
    return m;
  }

  /// Matrix part of L (boundary values excluded).
  Tridiagonal matrix() const {
    const std::size_t n = size();
    Tridiagonal t(n);
    for (std::size_t i = 0; i < n; ++i) {
      t.diag[i] = -(west_[i] + east_[i]);
      if (i > 0) t.lower[i] = west_[i];
      if (i + 1 < n) t.upper[i] = east_[i];
    }
    return t;
  }

  /// Affine part of L for the given boundary values of the differentiated variable.
  std::vector<double> affine(double left_value, double right_value) const {
    const std::size_t n = size();
    std::vector<double> b(n, 0.0);
    b[0] += bc_.left.is_dirichlet() ? west_[0] * left_value
                                    : grid_.face_area(0) * bc_.left.value * inv_volume_[0];
    b[n - 1] += bc_.right.is_dirichlet() ? east_[n - 1] * right_value
                                         : grid_.face_area(n) * bc_.right.value * inv_volume_[n - 1];
    return b;
  }
  std::vector<double> affine() const { return affine(bc_.left.value, bc_.right.value); }

  /// L applied to `u`, with Dirichlet faces taking `left_value`/`right_value`.
  std::vector<double> apply(const std::vector<double>& u, double left_value, double right_value) const {
    const std::size_t n = size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      if (i > 0) s += west_[i] * (u[i - 1] - u[i]);
      if (i + 1 < n) s += east_[i] * (u[i + 1] - u[i]);
      out[i] = s;
    }
    if (bc_.left.is_dirichlet()) out[0] += west_[0] * (left_value - u[0]);
    else out[0] += grid_.face_area(0) * bc_.left.value * inv_volume_[0];
    if (bc_.right.is_dirichlet()) out[n - 1] += east_[n - 1] * (right_value - u[n - 1]);
    else out[n - 1] += grid_.face_area(n) * bc_.right.value * inv_volume_[n - 1];
    return out;
  }
  std::vector<double> apply(const std::vector<double>& u) const {
    return apply(u, bc_.left.value, bc_.right.value);
  }

  double west(std::size_t i) const noexcept { return west_[i]; }
  double east(std::size_t i) const noexcept { return east_[i]; }

private:
  Grid grid_;
  BoundaryConditions bc_;
  std::vector<double> west_, east_, inv_volume_;
};

}  // namespace spl
