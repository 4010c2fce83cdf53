#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"
#include "spl/core/model.hpp"
#include "spl/core/stencil.hpp"
#include "spl/core/tridiagonal.hpp"
#include "spl/limit/elliptic.hpp"

namespace spl {

/// Which inequality a barrier satisfies for u_t - D Delta u = -D rho G(p).
enum class BarrierKind { sub, super };

inline const char* to_string(BarrierKind k) { return k == BarrierKind::sub ? "sub" : "super"; }

/**
 * @brief Parameters of a radial classical profile pair.
 *
 * The interface moves linearly, a(t) = a0 + a_slope t. Outside it the
 * density starts from rho_far + (1 - rho_far) exp(-decay s - curvature s^2),
 * s = r - a(0).
 */
struct PairSpec {
  int dimension = 2;
  double a0 = 1.0;
  double a_slope = -0.5;
  double t_end = 0.05;
  std::size_t samples = 60;
  std::size_t substeps = 4;
  double dx = 0.005;
  double outer_length = 2.0;
  double rho_far = 0.2;
  double decay = 6.0;
  double curvature = 18.0;
  double nu = 0.5;
  GrowthLaw growth;

  /// Shrinking interface with a steep exterior for sub; growing with a flat one for super.
  static PairSpec defaults(BarrierKind kind) {
    PairSpec s;
    if (kind == BarrierKind::super) {
      s.a_slope = 0.5;
      s.rho_far = 0.3;
      s.decay = 0.5;
      s.curvature = 2.0;
    }
    return s;
  }

  void validate() const {
    if (dimension < 1) throw InvalidParameter("pair dimension must be >= 1");
    if (!(a0 > 0.0) || !(a0 + a_slope * t_end > 0.0)) throw InvalidParameter("interface radius must stay positive");
    if (!(t_end > 0.0) || samples < 2 || substeps < 1) throw InvalidParameter("pair needs t_end > 0 and >= 2 samples");
    if (!(dx > 0.0) || !(outer_length > 4.0 * dx)) throw InvalidParameter("pair needs dx > 0 and outer_length > 4 dx");
    if (!(rho_far >= 0.0 && rho_far < 1.0)) throw InvalidParameter("rho_far must lie in [0, 1)");
    if (!(decay > 0.0) || !(nu > 0.0)) throw InvalidParameter("decay and nu must be > 0");
    if (!(curvature >= 0.0)) throw InvalidParameter("curvature must be >= 0");
  }
};

/**
 * @brief Exterior heat problem in the frame s = r - a(t).
 *
 * Solves rho_t - nu Delta_r rho = g rho + source for r > a(t) with
 * rho = interface_value at s = 0 and a Dirichlet far value that follows the
 * spatially uniform solution. Backward Euler; centered differences.
 */
struct MovingFrameProblem {
  int dimension = 2;
  double nu = 0.5;
  double rate = 1.0;
  double source = 0.0;
  double interface_value = 1.0;
  std::vector<double> initial;
};

inline double uniform_far_value(double y0, double rate, double source, double t) {
  if (rate == 0.0) return y0 + source * t;
  return (y0 + source / rate) * std::exp(rate * t) - source / rate;
}

/// One field per entry of `times`, on the s-mesh (0, L) with `initial.size()` cells.
inline std::vector<Field> solve_moving_frame(const MovingFrameProblem& pb, const std::vector<double>& times,
                                             const std::vector<double>& radii, double length, std::size_t substeps) {
  const std::size_t J = pb.initial.size();
  const Grid sgrid = Grid::cartesian(0.0, length, J);
  const double h = sgrid.dx();
  const double n1 = pb.dimension - 1.0;
  const double far0 = pb.initial.back();
  std::vector<Field> out;
  out.reserve(times.size());
  std::vector<double> R = pb.initial;
  out.emplace_back(sgrid, R, times.front());
  Tridiagonal M(J);
  std::vector<double> rhs(J);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double DT = times[k] - times[k - 1];
    const double dt = DT / static_cast<double>(substeps);
    const double a_prime = (radii[k] - radii[k - 1]) / DT;
    for (std::size_t q = 1; q <= substeps; ++q) {
      const double t = times[k - 1] + dt * static_cast<double>(q);
      const double a = radii[k - 1] + a_prime * dt * static_cast<double>(q);
      const double far = uniform_far_value(far0, pb.rate, pb.source, t);
      for (std::size_t j = 0; j < J; ++j) {
        const double r = a + sgrid.center(j);
        const double drift = (pb.nu * n1 / r + a_prime) / (2.0 * h);
        const double cl = pb.nu / (h * h) - drift;
        const double cu = pb.nu / (h * h) + drift;
        M.diag[j] = 1.0 - dt * (-2.0 * pb.nu / (h * h) + pb.rate);
        M.lower[j] = j > 0 ? -dt * cl : 0.0;
        M.upper[j] = j + 1 < J ? -dt * cu : 0.0;
        rhs[j] = R[j] + dt * pb.source;
        // Ghost values from the face data: R_ghost = 2 b - R_edge.
        if (j == 0) {
          M.diag[j] += dt * cl;
          rhs[j] += 2.0 * dt * cl * pb.interface_value;
        }
        if (j + 1 == J) {
          M.diag[j] += dt * cu;
          rhs[j] += 2.0 * dt * cu * far;
        }
      }
      R = M.solve(rhs);
    }
    out.emplace_back(sgrid, R, times[k]);
  }
  return out;
}

/// d/dn at a face from the face value and the two nearest cell centers, n pointing into the cells.
inline double one_sided_derivative(double face_value, double first, double second, double h) {
  return (-8.0 * face_value + 9.0 * first - second) / (3.0 * h);
}

/**
 * @brief Radial classical profile of the limit problem with a moving interface.
 *
 * p0(., t) solves -Delta p0 = G(p0) in {r < a(t)}, p0 = 0 on r = a(t);
 * rho0 solves the exterior heat problem with rho0 = 1 on r = a(t).
 * Inner fields live on radial meshes of the ball of radius a(t) with a
 * common cell count; exterior fields on the moving s-mesh.
 */
struct RadialProfilePair {
  PairSpec spec;
  std::vector<double> times;
  std::vector<double> radii;
  std::size_t inner_cells = 0;
  std::vector<Field> p0;
  std::vector<Field> rho0;

  double a_prime() const { return spec.a_slope; }
  Grid inner_grid(std::size_t k) const { return Grid::radial(spec.dimension, 0.0, radii[k], inner_cells); }
  double outer_dx() const { return rho0.front().grid.dx(); }

  /// |Dp0| at r = a(t_k).
  double pressure_slope(std::size_t k) const {
    const auto& f = p0[k];
    const std::size_t n = f.size();
    return one_sided_derivative(0.0, f[n - 1], f[n - 2], f.grid.dx());
  }
  /// |D rho0| at r = a(t_k).
  double density_slope(std::size_t k) const {
    const auto& f = rho0[k];
    return -one_sided_derivative(1.0, f[0], f[1], f.grid.dx());
  }

  /// sub when nu |D rho0| > |D p0| at every sample, super when < everywhere.
  BarrierKind kind() const {
    bool sub = true, super = true;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double gap = spec.nu * density_slope(k) - pressure_slope(k);
      sub = sub && gap > 0.0;
      super = super && gap < 0.0;
    }
    if (sub) return BarrierKind::sub;
    if (super) return BarrierKind::super;
    throw ConstructionFailure("profile pair has no consistent interface gradient ordering");
  }

  /// phi = -p0 inside, nu (1 - rho0) outside, at radius r and sample k.
  double phi(double r, std::size_t k) const;
};

namespace detail {

// Linear interpolation between cell centers, constant beyond the outer centers.
inline double interpolate_cells(const Field& f, double x) {
  const auto& g = f.grid;
  const double h = g.dx();
  const double t = (x - g.center(0)) / h;
  if (t <= 0.0) return f[0];
  const auto i = static_cast<std::size_t>(t);
  if (i + 1 >= f.size()) return f[f.size() - 1];
  const double w = t - static_cast<double>(i);
  return (1.0 - w) * f[i] + w * f[i + 1];
}

}  // namespace detail

inline double RadialProfilePair::phi(double r, std::size_t k) const {
  if (r < radii[k]) {
    const auto& f = p0[k];
    const double h = f.grid.dx();
    // Between the last center and the interface, blend toward p0 = 0.
    if (r > f.grid.center(f.size() - 1)) return -f[f.size() - 1] * (radii[k] - r) / (0.5 * h);
    return -detail::interpolate_cells(f, r);
  }
  const auto& f = rho0[k];
  const double s = r - radii[k];
  if (s < f.grid.center(0)) {
    const double w = s / (0.5 * f.grid.dx());
    return spec.nu * (1.0 - ((1.0 - w) * 1.0 + w * f[0]));
  }
  return spec.nu * (1.0 - detail::interpolate_cells(f, s));
}

inline std::vector<double> sample_times(double t_end, std::size_t samples) {
  std::vector<double> t(samples + 1);
  for (std::size_t k = 0; k <= samples; ++k) t[k] = t_end * static_cast<double>(k) / static_cast<double>(samples);
  return t;
}

/// Builds and validates a profile pair from its spec.
inline RadialProfilePair make_profile_pair(const PairSpec& spec) {
  spec.validate();
  RadialProfilePair pair;
  pair.spec = spec;
  pair.times = sample_times(spec.t_end, spec.samples);
  for (double t : pair.times) pair.radii.push_back(spec.a0 + spec.a_slope * t);
  const double a_max = *std::max_element(pair.radii.begin(), pair.radii.end());
  pair.inner_cells = std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(a_max / spec.dx)));

  const auto dirichlet0 = BoundaryConditions::both(Boundary::dirichlet(0.0));
  for (std::size_t k = 0; k < pair.times.size(); ++k) {
    Field p = solve_semilinear(pair.inner_grid(k), dirichlet0, spec.growth);
    p.time = pair.times[k];
    for (double v : p.values)
      if (!(v > 0.0)) throw ConstructionFailure("p0 must be positive inside the interface");
    pair.p0.push_back(std::move(p));
  }

  const auto J = static_cast<std::size_t>(std::lround(spec.outer_length / spec.dx));
  const Grid sgrid = Grid::cartesian(0.0, spec.outer_length, J);
  MovingFrameProblem pb;
  pb.dimension = spec.dimension;
  pb.nu = spec.nu;
  pb.rate = spec.growth.g0();
  pb.interface_value = 1.0;
  pb.initial.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    const double x = sgrid.center(j);
    pb.initial[j] = spec.rho_far + (1.0 - spec.rho_far) * std::exp(-spec.decay * x - spec.curvature * x * x);
  }
  pair.rho0 = solve_moving_frame(pb, pair.times, pair.radii, spec.outer_length, spec.substeps);
  for (const auto& f : pair.rho0)
    for (double v : f.values)
      if (!(v < 1.0 && v >= 0.0)) throw ConstructionFailure("rho0 must stay in [0, 1) outside the interface");
  return pair;
}

}  // namespace spl
