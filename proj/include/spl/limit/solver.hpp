#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"
#include "spl/core/model.hpp"
#include "spl/core/stencil.hpp"
#include "spl/limit/elliptic.hpp"
#include "spl/limit/free_boundary.hpp"
#include "spl/pme/solver.hpp"

namespace spl {

/**
 * @brief State of the limit problem b(u)_t - nu Delta u = (b(u) - nu) G(u^-).
 *
 * u^+ = nu (1 - rho) in the parabolic phase and u^- = p in the elliptic
 * phase. Boundary values are values of u itself.
 */
struct LimitState {
  Field u;
  ModelParams params;
  BoundaryConditions bc = BoundaryConditions::both(Boundary::dirichlet(0.5));

  double time() const noexcept { return u.time; }

  Field density() const {
    Field rho(u.grid, u.time);
    for (std::size_t i = 0; i < u.size(); ++i) rho[i] = 1.0 - b_graph(u[i]) / params.nu;
    return rho;
  }
  Field pressure() const {
    Field p(u.grid, u.time);
    for (std::size_t i = 0; i < u.size(); ++i) p[i] = negative_part(u[i]);
    return p;
  }

  void validate() const {
    params.validate();
    const double cap = params.nu + 1e-12;
    for (double v : u.values)
      if (!std::isfinite(v) || v > cap) throw InvalidData("limit variable must be finite and <= nu");
  }
};

/// Dirichlet data u = nu (1 - rho_L) on both ends.
inline BoundaryConditions limit_dirichlet(const ModelParams& p) {
  return BoundaryConditions::both(Boundary::dirichlet(p.nu * (1.0 - p.rho_L)));
}
/// Truncated far field: vacuum value nu on both ends.
inline BoundaryConditions limit_far_field(double nu) { return BoundaryConditions::both(Boundary::dirichlet(nu)); }
inline BoundaryConditions limit_zero_flux() { return BoundaryConditions::both(Boundary::zero_flux()); }

/**
 * @brief Initial datum u_0 = -w on {rho0 = 1}, nu (1 - rho0) elsewhere.
 *
 * w solves -Delta w = G(w) on each saturated component with w = 0 on the
 * component's boundary.
 */
inline LimitState project_initial_data(const Field& rho0, const ModelParams& params,
                                       BoundaryConditions bc) {
  params.validate();
  for (double r : rho0.values)
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidData("initial density must lie in [0, 1]");
  const double threshold = 1.0 - 1e-12;
  auto saturated = [&](std::size_t i) { return rho0[i] >= threshold; };
  const auto w = elliptic_pressure_on(rho0.grid, params.growth, saturated);
  LimitState s{Field(rho0.grid, rho0.time), params, bc};
  for (std::size_t i = 0; i < rho0.size(); ++i)
    s.u[i] = saturated(i) ? -w[i] : params.nu * (1.0 - rho0[i]);
  return s;
}

inline LimitState project_initial_data(const Field& rho0, const GrowthLaw& growth, double nu = 0.5) {
  ModelParams p;
  p.nu = nu;
  p.growth = growth;
  return project_initial_data(rho0, p, limit_dirichlet(p));
}

struct LimitStepInfo {
  int iterations = 0;
  double residual = 0.0;
  bool regularized = false;
};

/**
 * @brief Backward-Euler stepper for the limit problem.
 *
 * Each step solves
 *   b(U) - b(u^n) - dt [nu L U + (b(U) - nu) G(U^-)] = 0
 * by semismooth Newton with b'(u) = 1 for u >= 0 and 0 otherwise, with
 * backtracking on the sup-norm residual. If Newton stagnates the step is
 * retried once with b_eps(u) = u^+ + eps min(u, 0).
 */
class LimitStepper {
public:
  static constexpr double tolerance = 1e-10;
  static constexpr int max_iterations = 100;
  static constexpr double regularization = 1e-8;

  LimitStepper(const Grid& grid, const BoundaryConditions& bc)
      : stencil_(grid, bc), lap_(stencil_.matrix()), affine_(stencil_.affine()) {}

  LimitState step(const LimitState& s, double dt, LimitStepInfo* info = nullptr) const {
    if (!(dt > 0.0)) throw InvalidParameter("dt must be > 0");
    LimitStepInfo local;
    std::vector<double> U;
    if (!solve(s, dt, 0.0, U, local)) {
      const double first = local.residual;
      local.regularized = true;
      if (!solve(s, dt, regularization, U, local))
        throw StepFailure("limit Newton stagnated", std::max(first, local.residual));
    }
    const double cap = s.params.nu + 1e-12;
    for (double v : U)
      if (!std::isfinite(v) || v > cap) throw NumericalBlowup("limit step violated u <= nu");
    if (info) *info = local;
    LimitState out{Field(s.u.grid, std::move(U), s.u.time + dt), s.params, s.bc};
    return out;
  }

private:
  static double b_eps(double u, double eps) noexcept { return u >= 0.0 ? u : eps * u; }

  std::vector<double> residual(const LimitState& s, const std::vector<double>& U, double dt, double eps) const {
    const std::size_t n = U.size();
    const double nu = s.params.nu;
    const auto& G = s.params.growth;
    auto lu = lap_.apply(U);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double bu = b_eps(U[i], eps);
      r[i] = bu - b_eps(s.u[i], eps) - dt * (nu * (lu[i] + affine_[i]) + (bu - nu) * G(negative_part(U[i])));
    }
    return r;
  }

  bool solve(const LimitState& s, double dt, double eps, std::vector<double>& U, LimitStepInfo& info) const {
    const std::size_t n = s.u.size();
    const double nu = s.params.nu;
    const auto& G = s.params.growth;
    U = s.u.values;
    auto r = residual(s, U, dt, eps);
    double norm = sup_norm(r);
    int it = 0;
    for (; it < max_iterations && norm > tolerance; ++it) {
      Tridiagonal jac(n);
      std::vector<double> rhs(n);
      for (std::size_t i = 0; i < n; ++i) {
        const bool positive = U[i] >= 0.0;
        const double db = positive ? 1.0 : eps;
        const double p = negative_part(U[i]);
        const double dp = positive ? 0.0 : -1.0;
        jac.diag[i] = db - dt * nu * lap_.diag[i] - dt * (db * G(p) + (b_eps(U[i], eps) - nu) * G.derivative(p) * dp);
        jac.lower[i] = -dt * nu * lap_.lower[i];
        jac.upper[i] = -dt * nu * lap_.upper[i];
        rhs[i] = -r[i];
      }
      std::vector<double> delta;
      try {
        delta = jac.solve(rhs);
      } catch (const StepFailure&) {
        break;
      }
      // Backtracking: keep the trial with the smallest residual; a full step
      // is accepted when nothing decreases (the residual is only piecewise smooth).
      double lambda = 1.0, best_norm = INFINITY;
      std::vector<double> best, best_r;
      for (int k = 0; k < 30; ++k, lambda *= 0.5) {
        std::vector<double> trial(n);
        for (std::size_t i = 0; i < n; ++i) trial[i] = U[i] + lambda * delta[i];
        auto tr = residual(s, trial, dt, eps);
        const double tn = sup_norm(tr);
        if (tn < best_norm) {
          best_norm = tn;
          best = std::move(trial);
          best_r = std::move(tr);
        }
        if (tn <= (1.0 - 1e-4 * lambda) * norm) break;
      }
      if (!(best_norm < norm)) {
        for (std::size_t i = 0; i < n; ++i) U[i] += delta[i];
        r = residual(s, U, dt, eps);
        norm = sup_norm(r);
      } else {
        U = std::move(best);
        r = std::move(best_r);
        norm = best_norm;
      }
      if (!std::isfinite(norm)) break;
    }
    info.iterations += it;
    info.residual = norm;
    return norm <= tolerance;
  }

  DiffusionStencil stencil_;
  Tridiagonal lap_;
  std::vector<double> affine_;
};

inline LimitState limit_step(const LimitState& state, double dt, LimitStepInfo* info = nullptr) {
  return LimitStepper(state.u.grid, state.bc).step(state, dt, info);
}

/// A cell that crossed from u >= 0 to u < 0 within one step, with both one-sided values.
struct JumpEvent {
  double time_before = 0.0;
  double time_after = 0.0;
  std::size_t cell = 0;
  double u_before = 0.0;
  double u_after = 0.0;
};

struct LimitRunResult {
  std::vector<LimitState> snapshots;
  std::vector<FreeBoundary> boundaries;
  std::vector<JumpEvent> sign_flips;
};

inline constexpr double limit_default_dt = 1e-3;

/**
 * @brief Integrate the limit problem to each snapshot time.
 *
 * Scheduling matches pme_run. Free boundaries are extracted at every
 * snapshot, and every positive-to-negative cell flip is logged.
 */
template <class Observer = NoObserver>
LimitRunResult limit_run(const LimitState& initial, const StepControl& control, Observer&& observe = {}) {
  initial.validate();
  control.validate();
  LimitRunResult out;
  LimitState state = initial;
  const LimitStepper stepper(initial.u.grid, initial.bc);
  const double nominal = control.dt > 0.0 ? control.dt : limit_default_dt;
  for (double target : control.snapshot_times) {
    while (state.time() < target - 1e-14 * std::max(1.0, target)) {
      const double remaining = target - state.time();
      const double dt = nominal >= remaining * (1.0 - 1e-9) ? remaining : nominal;
      LimitState next = stepper.step(state, dt);
      if (dt == remaining) next.u.time = target;
      for (std::size_t i = 0; i < next.u.size(); ++i)
        if (state.u[i] >= 0.0 && next.u[i] < 0.0)
          out.sign_flips.push_back({state.time(), next.time(), i, state.u[i], next.u[i]});
      state = std::move(next);
      observe(state);
    }
    out.boundaries.push_back(extract_free_boundary(state.u));
    out.snapshots.push_back(state);
  }
  return out;
}

}  // namespace spl
