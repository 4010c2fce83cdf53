#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"

namespace spl {

/**
 * @brief Cell-multiplication rate as a function of pressure.
 *
 * The default law is affine, G(p) = g0 (1 - p / p_M). Any strictly
 * decreasing law with G(p_M) = 0 can be supplied through custom().
 * zero() returns G = 0, which switches the source off entirely.
 */
class GrowthLaw {
public:
  /// G(p) = 1 - p.
  GrowthLaw() = default;

  static GrowthLaw affine(double g0, double p_M) {
    if (!(g0 > 0.0)) throw InvalidParameter("growth rate g0 must be > 0");
    if (!(p_M > 0.0)) throw InvalidParameter("homeostatic pressure p_M must be > 0");
    GrowthLaw law(Kind::affine);
    law.g0_ = g0;
    law.p_M_ = p_M;
    return law;
  }

  static GrowthLaw zero() {
    GrowthLaw law(Kind::zero);
    law.g0_ = 0.0;
    law.p_M_ = 1.0;
    return law;
  }

  /// `value` must be strictly decreasing with value(p_M) = 0; `slope` is its derivative.
  static GrowthLaw custom(double p_M, std::function<double(double)> value, std::function<double(double)> slope) {
    if (!(p_M > 0.0)) throw InvalidParameter("homeostatic pressure p_M must be > 0");
    GrowthLaw law(Kind::custom);
    law.p_M_ = p_M;
    law.g0_ = value(0.0);
    if (!(law.g0_ > 0.0)) throw InvalidParameter("custom growth law needs G(0) > 0");
    law.value_ = std::move(value);
    law.slope_ = std::move(slope);
    return law;
  }

  double evaluate(double p) const {
    switch (kind_) {
      case Kind::affine: return g0_ * (1.0 - p / p_M_);
      case Kind::zero: return 0.0;
      case Kind::custom: return value_(p);
    }
    return 0.0;
  }
  double operator()(double p) const { return evaluate(p); }

  double derivative(double p) const {
    switch (kind_) {
      case Kind::affine: return -g0_ / p_M_;
      case Kind::zero: return 0.0;
      case Kind::custom: return slope_(p);
    }
    return 0.0;
  }

  double g0() const noexcept { return g0_; }
  double p_M() const noexcept { return p_M_; }
  bool is_affine() const noexcept { return kind_ == Kind::affine; }
  bool is_zero() const noexcept { return kind_ == Kind::zero; }

private:
  enum class Kind { affine, zero, custom };
  explicit GrowthLaw(Kind k) : kind_(k) {}

  Kind kind_ = Kind::affine;
  double g0_ = 1.0;
  double p_M_ = 1.0;
  std::function<double(double)> value_;
  std::function<double(double)> slope_;
};

/// Full parameterization of the density equation.
struct ModelParams {
  double m = 20.0;
  double nu = 0.5;
  GrowthLaw growth;
  double rho_L = 0.0;
  double M0 = 1.0;

  void validate() const {
    if (!(m > 1.0)) throw InvalidParameter("m must be > 1");
    if (!(nu > 0.0)) throw InvalidParameter("nu must be > 0 (nu = 0 is not supported)");
    if (!(rho_L >= 0.0 && rho_L < 1.0)) throw InvalidParameter("rho_L must lie in [0, 1)");
    if (!(M0 > 0.0)) throw InvalidParameter("M0 must be > 0");
  }
};

inline void require_exponent(double m) {
  if (!(m > 1.0)) throw InvalidParameter("m must be > 1");
}

/// p = m/(m-1) rho^(m-1).
inline double pressure_of_density(double rho, double m) {
  require_exponent(m);
  if (!(rho >= 0.0)) throw InvalidParameter("density must be nonnegative");
  return m / (m - 1.0) * std::pow(rho, m - 1.0);
}

/// Inverse of pressure_of_density.
inline double density_of_pressure(double p, double m) {
  require_exponent(m);
  if (!(p >= 0.0)) throw InvalidParameter("pressure must be nonnegative");
  return std::pow((m - 1.0) * p / m, 1.0 / (m - 1.0));
}

/// Nonlinear diffusivity d/drho (rho^m + nu rho) = m rho^(m-1) + nu.
inline double effective_diffusivity(double rho, double m, double nu) {
  return m * std::pow(std::max(rho, 0.0), m - 1.0) + nu;
}
inline double effective_diffusivity(double rho, const ModelParams& p) { return effective_diffusivity(rho, p.m, p.nu); }

/// Phi(rho) = -rho^m + nu (1 - rho), the density-to-u transform.
inline double phi_transform(double rho, double m, double nu) {
  if (!(rho >= 0.0)) throw InvalidParameter("density must be nonnegative");
  return -std::pow(rho, m) + nu * (1.0 - rho);
}
inline double phi_transform(double rho, const ModelParams& p) { return phi_transform(rho, p.m, p.nu); }

inline double phi_derivative(double rho, double m, double nu) { return -effective_diffusivity(rho, m, nu); }

namespace detail {

// Root of Phi(rho) = u on [lo, hi] with Phi(lo) >= u >= Phi(hi): Newton steps
// safeguarded by bisection (at most 200 iterations), then a Newton polish.
inline double invert_phi_bracketed(double u, double m, double nu, double lo, double hi) {
  double rho = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double f = phi_transform(rho, m, nu) - u;
    if (f == 0.0) return rho;
    if (f > 0.0) lo = rho;
    else hi = rho;
    const double newton = rho - f / phi_derivative(rho, m, nu);
    const double next = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    if (std::abs(next - rho) <= 1e-16 * std::max(1.0, rho)) {
      rho = next;
      break;
    }
    rho = next;
  }
  for (int it = 0; it < 2; ++it) {
    const double f = phi_transform(rho, m, nu) - u;
    const double next = rho - f / phi_derivative(rho, m, nu);
    if (!(next >= lo && next <= hi)) break;
    rho = next;
  }
  return rho;
}

}  // namespace detail

/// Unique rho in [0, 1] with Phi(rho) = u; u must lie in [Phi(1), Phi(0)] = [-1, nu].
inline double phi_inverse(double u, double m, double nu) {
  require_exponent(m);
  const double slack = 1e-14 * std::max(1.0, nu);
  if (!(u >= -1.0 - slack && u <= nu + slack)) throw RangeError("phi_inverse: u outside [-1, nu]");
  if (u >= nu) return 0.0;
  if (u <= -1.0) return 1.0;
  return detail::invert_phi_bracketed(u, m, nu, 0.0, 1.0);
}
inline double phi_inverse(double u, const ModelParams& p) { return phi_inverse(u, p.m, p.nu); }

/// Inverse of Phi on all of [0, inf): any u <= nu, densities above 1 allowed.
inline double phi_inverse_extended(double u, double m, double nu) {
  require_exponent(m);
  if (!(u <= nu + 1e-14 * std::max(1.0, nu))) throw RangeError("phi_inverse_extended: u above nu");
  if (u >= nu) return 0.0;
  if (u >= -1.0) return phi_inverse(u, m, nu);
  double hi = 2.0;
  while (phi_transform(hi, m, nu) > u) {
    hi *= 2.0;
    if (hi > 1e12) throw RangeError("phi_inverse_extended: u too negative");
  }
  return detail::invert_phi_bracketed(u, m, nu, 1.0, hi);
}

/// Psi(p) = Phi(density_of_pressure(p)).
inline double psi_transform(double p, double m, double nu) {
  return phi_transform(density_of_pressure(p, m), m, nu);
}
inline double psi_transform(double p, const ModelParams& params) { return psi_transform(p, params.m, params.nu); }

/// Pressure p >= 0 with Psi(p) = u, for u <= nu.
inline double psi_inverse(double u, double m, double nu) {
  return pressure_of_density(phi_inverse_extended(u, m, nu), m);
}

/// b(u) = max(u, 0).
constexpr double b_graph(double u) noexcept { return u > 0.0 ? u : 0.0; }
/// u^- = -min(u, 0).
constexpr double negative_part(double u) noexcept { return u < 0.0 ? -u : 0.0; }

/// Pointwise Phi of a density field.
inline Field u_of_pme_state(const Field& rho, const ModelParams& params) {
  Field u(rho.grid, rho.time);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] >= 0.0)) throw InvalidData("density field must be nonnegative");
    u[i] = phi_transform(rho[i], params);
  }
  return u;
}

inline Field pressure_field(const Field& rho, double m) {
  Field p(rho.grid, rho.time);
  for (std::size_t i = 0; i < rho.size(); ++i) p[i] = pressure_of_density(std::max(rho[i], 0.0), m);
  return p;
}

}  // namespace spl
