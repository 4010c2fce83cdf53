#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "spl/core/errors.hpp"

namespace spl {

enum class Geometry { cartesian, radial };

/**
 * @brief Uniform cell-centered 1D mesh.
 *
 * Cartesian intervals use unit face areas. Radial meshes discretize the
 * radius of an n-dimensional ball or annulus and weight faces by r^(n-1)
 * and cells by the exact shell volume (r_{i+1/2}^n - r_{i-1/2}^n)/n, so
 * flux-form updates conserve sum(value * cell_volume) exactly.
 */
class Grid {
public:
  Grid() = default;

  Grid(Geometry geometry, int dimension, double x_min, double x_max, std::size_t n_cells)
      : geometry_(geometry), dimension_(dimension), x_min_(x_min), x_max_(x_max), n_(n_cells) {
    if (n_cells == 0) throw InvalidParameter("grid needs at least one cell");
    if (!(x_max > x_min)) throw InvalidParameter("grid requires x_max > x_min");
    if (geometry == Geometry::radial) {
      if (x_min < 0.0) throw InvalidParameter("radial grid requires x_min >= 0");
      if (dimension < 1) throw InvalidParameter("radial grid requires dimension >= 1");
    } else {
      dimension_ = 1;
    }
  }

  static Grid cartesian(double x_min, double x_max, std::size_t n_cells) {
    return Grid(Geometry::cartesian, 1, x_min, x_max, n_cells);
  }
  static Grid radial(int dimension, double r_min, double r_max, std::size_t n_cells) {
    return Grid(Geometry::radial, dimension, r_min, r_max, n_cells);
  }

  Geometry geometry() const noexcept { return geometry_; }
  int dimension() const noexcept { return dimension_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return (x_max_ - x_min_) / static_cast<double>(n_); }

  double center(std::size_t i) const noexcept { return x_min_ + (static_cast<double>(i) + 0.5) * dx(); }
  /// Position of face i, i in [0, n].
  double face(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx(); }

  double face_area(std::size_t i) const noexcept {
    if (geometry_ == Geometry::cartesian || dimension_ == 1) return 1.0;
    return std::pow(face(i), dimension_ - 1);
  }

  double cell_volume(std::size_t i) const noexcept {
    if (geometry_ == Geometry::cartesian || dimension_ == 1) return dx();
    const double n = dimension_;
    return (std::pow(face(i + 1), n) - std::pow(face(i), n)) / n;
  }

  /// True when the left face is the symmetry point r = 0 of a radial mesh.
  bool has_origin() const noexcept { return geometry_ == Geometry::radial && x_min_ == 0.0; }

  std::vector<double> centers() const {
    std::vector<double> c(n_);
    for (std::size_t i = 0; i < n_; ++i) c[i] = center(i);
    return c;
  }

  /// Same layout, endpoints scaled by `factor` (used for self-similar rescaling).
  Grid scaled(double factor) const {
    return Grid(geometry_, dimension_, x_min_ * factor, x_max_ * factor, n_);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  Geometry geometry_ = Geometry::cartesian;
  int dimension_ = 1;
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  std::size_t n_ = 1;
};

/// Scalar samples on a Grid at a time level.
struct Field {
  Grid grid;
  std::vector<double> values;
  double time = 0.0;

  Field() = default;
  Field(Grid g, double t = 0.0) : grid(std::move(g)), values(grid.size(), 0.0), time(t) {}
  Field(Grid g, std::vector<double> v, double t = 0.0) : grid(std::move(g)), values(std::move(v)), time(t) {
    if (values.size() != grid.size()) throw InvalidData("field length does not match grid");
  }

  template <class F>
  static Field sample(const Grid& g, F&& f, double t = 0.0) {
    Field out(g, t);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = f(g.center(i));
    return out;
  }

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> view() const noexcept { return values; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  /// Integral with the grid's volume weights.
  double integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * grid.cell_volume(i);
    return s;
  }
};

inline double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::fmax(m, std::fabs(x));
  return m;
}

inline double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidData("sup_distance: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace spl
