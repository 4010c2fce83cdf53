#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"
#include "spl/core/model.hpp"
#include "spl/core/stencil.hpp"
#include "spl/core/tridiagonal.hpp"

namespace spl {

enum class Scheme { automatic, explicit_euler, semi_implicit };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::automatic: return "auto";
    case Scheme::explicit_euler: return "explicit";
    case Scheme::semi_implicit: return "semi-implicit";
  }
  return "?";
}

/// Stepping schedule shared by both solvers. dt <= 0 selects the automatic step.
struct StepControl {
  double dt = 0.0;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  Scheme scheme = Scheme::automatic;

  void validate() const {
    if (!(t_end >= 0.0)) throw InvalidParameter("t_end must be >= 0");
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
      const double t = snapshot_times[i];
      if (!(t >= 0.0 && t <= t_end)) throw InvalidParameter("snapshot times must lie in [0, t_end]");
      if (i > 0 && !(t > snapshot_times[i - 1])) throw InvalidParameter("snapshot times must be strictly increasing");
    }
  }
};

/// Density state of the m-dependent equation.
struct PmeState {
  Field rho;
  ModelParams params;
  /// Dirichlet values are densities on the boundary face.
  BoundaryConditions bc = BoundaryConditions::both(Boundary::dirichlet(0.0));

  double time() const noexcept { return rho.time; }

  Field pressure() const { return pressure_field(rho, params.m); }
  Field u() const { return u_of_pme_state(rho, params); }

  void validate() const {
    params.validate();
    for (double r : rho.values)
      if (!std::isfinite(r) || r < 0.0) throw InvalidData("density must be finite and nonnegative");
  }
};

inline BoundaryConditions pme_dirichlet(double rho_L) { return BoundaryConditions::both(Boundary::dirichlet(rho_L)); }
inline BoundaryConditions pme_zero_flux() { return BoundaryConditions::both(Boundary::zero_flux()); }

/// Schemes resolve `automatic` to explicit below m = 60 and semi-implicit above.
inline Scheme resolve_scheme(Scheme s, double m) {
  if (s != Scheme::automatic) return s;
  return m >= 60.0 ? Scheme::semi_implicit : Scheme::explicit_euler;
}

namespace detail {

inline double flux_potential(double rho, double m, double nu) { return std::pow(rho, m) + nu * rho; }

inline std::vector<double> potentials(const std::vector<double>& rho, double m, double nu) {
  std::vector<double> w(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) w[i] = flux_potential(rho[i], m, nu);
  return w;
}

inline double boundary_potential(const Boundary& b, double m, double nu) {
  return b.is_dirichlet() ? flux_potential(b.value, m, nu) : 0.0;
}

inline void check_finite(const std::vector<double>& v, const char* where) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericalBlowup(std::string("non-finite density in ") + where);
}

}  // namespace detail

/// Default implicit step: resolves the 1/m pressure relaxation time scale.
inline double semi_implicit_default_dt(const ModelParams& p) {
  return std::min(1e-3, 0.5 / (p.m * std::max(p.growth.g0(), 1.0)));
}

/**
 * @brief Reusable stepping workspace for one mesh and boundary setup.
 *
 * Caches the diffusion stencil so long explicit runs evaluate rho^m once
 * per cell per step. Not thread-safe; give each run its own stepper.
 */
class PmeStepper {
public:
  PmeStepper(const Grid& grid, const BoundaryConditions& bc) : stencil_(grid, bc) {}

  const DiffusionStencil& stencil() const noexcept { return stencil_; }

  /**
   * @brief Largest explicit step honouring the stability contract.
   *
   * dt <= 0.9 / max_i (w_i D(rho_i) - min(0, d(rho G)/drho)), where w_i is
   * the row weight of the stencil and D = m rho^(m-1) + nu. Without growth
   * on an interior Cartesian row this is dt <= 0.45 dx^2 / D. Every
   * coefficient of the update is then nonnegative, so the step is monotone.
   */
  double stable_dt(const PmeState& s) {
    evaluate(s);
    return stable_dt_cached();
  }

  PmeState step(const PmeState& s, double dt, Scheme scheme) {
    if (!(dt > 0.0)) throw InvalidParameter("dt must be > 0");
    if (resolve_scheme(scheme, s.params.m) == Scheme::semi_implicit) return implicit_step(s, dt);
    evaluate(s);
    const double limit = stable_dt_cached();
    if (dt > limit * (1.0 + 1e-12))
      throw InvalidParameter("explicit step violates stability contract (dt=" + std::to_string(dt) +
                             ", limit=" + std::to_string(limit) + ")");
    return explicit_from_cache(s, dt);
  }

  /// Explicit step at the largest stable dt, capped by `max_dt`.
  PmeState auto_explicit_step(const PmeState& s, double max_dt, double* taken = nullptr) {
    evaluate(s);
    const double dt = std::min(stable_dt_cached(), max_dt);
    if (taken) *taken = dt;
    return explicit_from_cache(s, dt);
  }

private:
  // Fills potential_, source_ and the largest per-cell monotonicity rate
  // row_i * D(rho_i) - d(rho G)/drho for state s.
  void evaluate(const PmeState& s) {
    const auto& prm = s.params;
    const double m = prm.m, nu = prm.nu;
    const std::size_t n = s.rho.size();
    potential_.resize(n);
    source_.resize(n);
    rate_max_ = 0.0;
    const bool growth = !prm.growth.is_zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double r = s.rho[i];
      const double rm = std::pow(r, m);
      potential_[i] = rm + nu * r;
      double src = 0.0, dsrc = 0.0, d = nu;
      if (r > 0.0) {
        const double rm1 = rm / r;
        d += m * rm1;
        if (growth) {
          const double p = m / (m - 1.0) * rm1;
          const double g = prm.growth(p);
          src = r * g;
          dsrc = g + prm.growth.derivative(p) * m * rm1;
        }
      }
      source_[i] = src;
      rate_max_ = std::max(rate_max_, stencil_.row_weight(i) * d + std::max(0.0, -dsrc));
    }
    const auto& bc = stencil_.boundary();
    wl_ = detail::boundary_potential(bc.left, m, nu);
    wr_ = detail::boundary_potential(bc.right, m, nu);
  }

  double stable_dt_cached() const { return rate_max_ > 0.0 ? 0.9 / rate_max_ : INFINITY; }

  PmeState explicit_from_cache(const PmeState& s, double dt) {
    const auto div = stencil_.apply(potential_, wl_, wr_);
    PmeState out = s;
    for (std::size_t i = 0; i < div.size(); ++i) out.rho[i] = std::max(0.0, s.rho[i] + dt * (div[i] + source_[i]));
    detail::check_finite(out.rho.values, "explicit step");
    out.rho.time = s.rho.time + dt;
    return out;
  }

  // Backward Euler for diffusion and source; Newton with tridiagonal
  // Jacobian and residual-decrease backtracking.
  PmeState implicit_step(const PmeState& s, double dt) {
    const auto& prm = s.params;
    const double m = prm.m, nu = prm.nu;
    const auto& st = stencil_;
    const Tridiagonal lap = st.matrix();
    const double wl = detail::boundary_potential(st.boundary().left, m, nu);
    const double wr = detail::boundary_potential(st.boundary().right, m, nu);
    const std::size_t n = s.rho.size();
    const bool growth = !prm.growth.is_zero();

    auto residual = [&](const std::vector<double>& rho) {
      const auto div = st.apply(detail::potentials(rho, m, nu), wl, wr);
      std::vector<double> r(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double src = growth ? rho[i] * prm.growth(pressure_of_density(rho[i], m)) : 0.0;
        r[i] = rho[i] - s.rho[i] - dt * (div[i] + src);
      }
      return r;
    };

    std::vector<double> rho = s.rho.values;
    auto res = residual(rho);
    double res_norm = sup_norm(res);
    constexpr int max_iterations = 60;
    Tridiagonal jac(n);
    std::vector<double> dw(n), rhs(n), trial(n);
    for (int it = 0; it < max_iterations; ++it) {
      for (std::size_t i = 0; i < n; ++i) dw[i] = effective_diffusivity(rho[i], m, nu);
      for (std::size_t i = 0; i < n; ++i) {
        double ds = 0.0;
        if (growth) {
          const double p = pressure_of_density(rho[i], m);
          ds = prm.growth(p) + prm.growth.derivative(p) * m * std::pow(rho[i], m - 1.0);
        }
        jac.diag[i] = 1.0 - dt * (lap.diag[i] * dw[i] + ds);
        if (i > 0) jac.lower[i] = -dt * lap.lower[i] * dw[i - 1];
        if (i + 1 < n) jac.upper[i] = -dt * lap.upper[i] * dw[i + 1];
        rhs[i] = -res[i];
      }
      const auto delta = jac.solve(rhs);
      // Roundoff floor of the residual: it carries dt * div, whose rows scale like 1 - jac.diag.
      double scale = 1.0;
      for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(jac.diag[i]));

      double lambda = 1.0;
      std::vector<double> trial_res;
      double trial_norm = 0.0;
      for (int ls = 0; ls < 30; ++ls) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(0.0, rho[i] + lambda * delta[i]);
        trial_res = residual(trial);
        trial_norm = sup_norm(trial_res);
        if (trial_norm < res_norm || trial_norm <= 1e-13) break;
        lambda *= 0.5;
      }
      const double step = lambda * sup_norm(delta);
      rho = trial;
      res = std::move(trial_res);
      res_norm = trial_norm;
      detail::check_finite(rho, "implicit step");
      if (res_norm <= 1e-12 * scale && step <= 1e-10 * std::max(1.0, sup_norm(rho))) {
        PmeState out = s;
        out.rho.values = std::move(rho);
        out.rho.time = s.rho.time + dt;
        return out;
      }
    }
    throw StepFailure("pme implicit step did not converge", res_norm);
  }

  DiffusionStencil stencil_;
  std::vector<double> potential_, source_;
  double rate_max_ = 0.0, wl_ = 0.0, wr_ = 0.0;
};

inline double explicit_stable_dt(const PmeState& s) { return PmeStepper(s.rho.grid, s.bc).stable_dt(s); }

/**
 * @brief Advance the density one step in conservative form.
 *
 * Interface fluxes are centered differences of rho^m + nu rho (radial
 * meshes use the r^(n-1)-weighted divergence). The explicit scheme treats
 * the source rho G(p) explicitly and requires dt <= explicit_stable_dt;
 * the semi-implicit scheme is backward Euler solved by Newton.
 */
inline PmeState pme_step(const PmeState& state, double dt, Scheme scheme = Scheme::automatic) {
  if (!(dt > 0.0)) throw InvalidParameter("dt must be > 0");
  PmeStepper stepper(state.rho.grid, state.bc);
  return stepper.step(state, dt, scheme);
}

struct NoObserver {
  template <class S>
  void operator()(const S&) const noexcept {}
};

/**
 * @brief Integrate to each snapshot time.
 *
 * Steps of the nominal size are taken while they stay below the next
 * snapshot, then the final step is shrunk to land on it exactly. The
 * observer is called after every step.
 */
template <class Observer = NoObserver>
std::vector<PmeState> pme_run(const PmeState& initial, const StepControl& control, Observer&& observe = {}) {
  initial.validate();
  control.validate();
  const Scheme scheme = resolve_scheme(control.scheme, initial.params.m);
  std::vector<PmeState> snapshots;
  PmeState state = initial;
  PmeStepper stepper(initial.rho.grid, initial.bc);
  const bool auto_explicit = control.dt <= 0.0 && scheme == Scheme::explicit_euler;
  for (double target : control.snapshot_times) {
    while (state.time() < target - 1e-14 * std::max(1.0, target)) {
      const double remaining = target - state.time();
      double dt = 0.0;
      if (auto_explicit) {
        state = stepper.auto_explicit_step(state, remaining, &dt);
      } else {
        dt = control.dt > 0.0 ? control.dt : semi_implicit_default_dt(state.params);
        if (dt >= remaining * (1.0 - 1e-9)) dt = remaining;
        state = stepper.step(state, dt, scheme);
      }
      if (dt >= remaining) state.rho.time = target;
      observe(state);
    }
    snapshots.push_back(state);
  }
  return snapshots;
}

/// Well-prepared initial data: clip rho0 at the density of pressure M0.
inline Field prepare_initial_density(const Field& rho0, const ModelParams& params) {
  params.validate();
  const double cap = density_of_pressure(params.M0, params.m);
  Field out = rho0;
  for (auto& r : out.values) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidData("initial density must lie in [0, 1]");
    r = std::min(r, cap);
  }
  return out;
}

}  // namespace spl
