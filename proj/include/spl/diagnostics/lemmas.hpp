#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <limits>
#include <string>
#include <vector>

#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"
#include "spl/core/model.hpp"
#include "spl/diagnostics/report.hpp"
#include "spl/limit/elliptic.hpp"
#include "spl/limit/free_boundary.hpp"
#include "spl/limit/solver.hpp"
#include "spl/pme/solver.hpp"

namespace spl {

// ---------------------------------------------------------------------------
// Pressure bound for the m-dependent problem

struct PressureBoundScenario {
  double factor = 2.0;    ///< initial max pressure / p_M
  double epsilon = 0.05;  ///< allowed excess over p_M
  double t_end = 0.5;
  double relax_constant = 10.0;  ///< required t_relax <= relax_constant / m
  double ratio_tolerance = 0.3;  ///< relative slack on the 1/m scaling of t_relax
  std::size_t cells = 100;
};

/// Time after which max_x p stays <= p_M + epsilon, from every step of an explicit run.
inline double pressure_relaxation_time(const ModelParams& params, const PressureBoundScenario& sc) {
  const double p_M = params.growth.p_M();
  const Grid g = Grid::cartesian(-1.0, 1.0, sc.cells);
  const Field rho0 = Field::sample(g, [&](double x) {
    return density_of_pressure(sc.factor * p_M * std::max(0.0, 1.0 - x * x), params.m);
  });
  PmeState s{rho0, params, pme_zero_flux()};
  StepControl c;
  c.t_end = sc.t_end;
  c.snapshot_times = {sc.t_end};
  c.scheme = Scheme::explicit_euler;
  const double cap = p_M + sc.epsilon;
  double last_above = sup_norm(s.pressure().values) > cap ? 0.0 : -1.0;
  pme_run(s, c, [&](const PmeState& st) {
    double pmax = 0.0;
    for (double r : st.rho.values) pmax = std::max(pmax, pressure_of_density(r, params.m));
    if (pmax > cap) last_above = st.time();
  });
  if (last_above >= sc.t_end) return std::numeric_limits<double>::infinity();
  return std::max(last_above, 0.0);
}

/**
 * @brief max_x p_m(t) <= p_M + epsilon once t >= t_relax(m), with t_relax <= K/m.
 *
 * Each m is one trial (run concurrently). The fitted K = max_m m t_relax(m)
 * is reported; consecutive m values must show t_relax scaling like 1/m
 * within `ratio_tolerance`.
 */
inline LemmaCheckResult pressure_bound_check(const ModelParams& base, const std::vector<double>& m_values,
                                             const PressureBoundScenario& sc = {}) {
  if (!(sc.factor >= 1.0)) throw InvalidParameter("overshoot factor must be >= 1");
  LemmaCheckResult res;
  res.lemma_id = "pressure-bound";
  std::vector<std::future<double>> jobs;
  for (double m : m_values) {
    jobs.push_back(std::async(std::launch::async, [&, m] {
      ModelParams p = base;
      p.m = m;
      p.validate();
      return pressure_relaxation_time(p, sc);
    }));
  }
  std::vector<double> t_relax;
  double K = 0.0;
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    t_relax.push_back(jobs[i].get());
    const double bound = sc.relax_constant / m_values[i];
    res.details.push_back({"t_relax", m_values[i], t_relax[i], bound, t_relax[i] <= bound});
    K = std::max(K, m_values[i] * t_relax[i]);
  }
  for (std::size_t i = 1; i < m_values.size(); ++i) {
    const double expected = m_values[i - 1] / m_values[i];
    const double ratio = t_relax[i - 1] > 0.0 ? t_relax[i] / t_relax[i - 1] : (t_relax[i] == 0.0 ? expected : INFINITY);
    res.details.push_back({"t_relax_ratio", m_values[i], ratio, expected,
                           std::abs(ratio / expected - 1.0) <= sc.ratio_tolerance});
  }
  res.fitted.emplace_back("K", K);
  res.settle();
  return res;
}

// ---------------------------------------------------------------------------
// Shared limit-problem scenario helpers

/// First step time at which every cell with center < radius satisfies `pred`; infinity if none by t_end.
template <class Pred>
double first_time_on_ball(const LimitState& initial, double radius, double dt, double t_end, Pred&& pred) {
  const LimitStepper stepper(initial.u.grid, initial.bc);
  auto holds = [&](const LimitState& s) {
    for (std::size_t i = 0; i < s.u.size() && s.u.grid.center(i) < radius; ++i)
      if (!pred(s.u[i])) return false;
    return true;
  };
  if (holds(initial)) return initial.time();
  LimitState s = initial;
  const double t0 = initial.time();
  const auto steps = static_cast<std::size_t>(std::ceil((t_end - t0) / dt - 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) {
    s = stepper.step(s, dt);
    if (holds(s)) return s.time();
  }
  return std::numeric_limits<double>::infinity();
}

/// Last step time (<= horizon) up to which `pred` held on the whole ball; the horizon itself if it never failed.
template <class Pred>
double persistence_on_ball(const LimitState& initial, double radius, double dt, double horizon, Pred&& pred) {
  const LimitStepper stepper(initial.u.grid, initial.bc);
  auto holds = [&](const LimitState& s) {
    for (std::size_t i = 0; i < s.u.size() && s.u.grid.center(i) < radius; ++i)
      if (!pred(s.u[i])) return false;
    return true;
  };
  LimitState s = initial;
  const double t0 = initial.time();
  double last_ok = t0;
  if (!holds(s)) return -std::numeric_limits<double>::infinity();
  const auto steps = static_cast<std::size_t>(std::ceil((horizon - t0) / dt - 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) {
    s = stepper.step(s, std::min(dt, horizon - s.time()));
    if (!holds(s)) return last_ok;
    last_ok = s.time();
  }
  return horizon;
}

// ---------------------------------------------------------------------------
// Nucleation timing

struct NucleationScenario {
  double r = 0.5;
  int dimension = 2;
  double cells_per_r = 50.0;
  double far_value = 0.45;  ///< u outside B_2r
  double steps_per_time = 100.0;  ///< dt = min positive eps / (nu G(0)) / steps_per_time
};

/// u = eps on B_r, rising linearly to far_value on B_2r, constant beyond; domain (0, 4r), zero flux.
inline LimitState nucleation_initial(double eps, const ModelParams& params, const NucleationScenario& sc) {
  const double r = sc.r;
  const auto n = static_cast<std::size_t>(std::lround(4.0 * sc.cells_per_r));
  const Grid g = Grid::radial(sc.dimension, 0.0, 4.0 * r, n);
  const Field u = Field::sample(g, [&](double x) {
    if (x <= r) return eps;
    if (x >= 2.0 * r) return sc.far_value;
    return eps + (sc.far_value - eps) * (x - r) / r;
  });
  return LimitState{u, params, limit_zero_flux()};
}

/**
 * @brief u(., t0) <= eps on B_r gives u < 0 on B_{r/4} after a time linear in eps.
 *
 * Measured time of the first step with all of B_{r/4} negative, per eps;
 * slope through the origin fitted on `eps_values`; C_n = slope nu G(0).
 * Checks: nucleation before r^2; slope ratios of successive eps values in
 * [0.5, 2]; each held-out eps nucleates no later than slope * eps.
 */
inline LemmaCheckResult nucleation_timing_check(const std::vector<double>& eps_values, const std::vector<double>& held_out,
                                                const ModelParams& params, const NucleationScenario& sc = {}) {
  params.validate();
  const double g0 = params.growth(0.0);
  if (!(g0 > 0.0)) throw InvalidParameter("nucleation check needs G(0) > 0");
  std::vector<double> all = eps_values;
  all.insert(all.end(), held_out.begin(), held_out.end());
  double smallest = INFINITY;
  for (double e : all) {
    if (!(e >= 0.0 && e < sc.r * sc.r)) throw InvalidParameter("nucleation check needs 0 <= eps < r^2");
    if (e > 0.0) smallest = std::min(smallest, e);
  }
  const double dt = std::isfinite(smallest) ? smallest / (params.nu * g0) / sc.steps_per_time : 1e-4;
  const double horizon = sc.r * sc.r;

  std::vector<std::future<double>> jobs;
  for (double e : all)
    jobs.push_back(std::async(std::launch::async, [&, e] {
      return first_time_on_ball(nucleation_initial(e, params, sc), 0.25 * sc.r, dt, horizon,
                                [](double u) { return u < 0.0; });
    }));
  std::vector<double> times;
  for (auto& j : jobs) times.push_back(j.get());

  LemmaCheckResult res;
  res.lemma_id = "nucleation-timing";
  std::vector<double> fit_eps, fit_t;
  for (std::size_t i = 0; i < eps_values.size(); ++i) {
    res.details.push_back({"nucleation_time", eps_values[i], times[i], horizon, times[i] <= horizon});
    if (eps_values[i] > 0.0 && std::isfinite(times[i])) {
      fit_eps.push_back(eps_values[i]);
      fit_t.push_back(times[i]);
    }
  }
  const double slope = fit_eps.empty() ? 0.0 : slope_through_origin(fit_eps, fit_t);
  for (std::size_t i = 1; i < fit_eps.size(); ++i) {
    const double ratio = (fit_t[i] / fit_eps[i]) / (fit_t[i - 1] / fit_eps[i - 1]);
    res.details.push_back({"slope_ratio", fit_eps[i], ratio, 2.0, ratio >= 0.5 && ratio <= 2.0});
  }
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    const double t = times[eps_values.size() + i];
    const double bound = held_out[i] > 0.0 ? slope * held_out[i] : dt;
    res.details.push_back({"held_out_time", held_out[i], t, bound, t <= bound});
  }
  res.fitted.emplace_back("slope", slope);
  res.fitted.emplace_back("C_n", slope * params.nu * g0);
  res.fitted.emplace_back("dt", dt);
  res.settle();
  return res;
}

// ---------------------------------------------------------------------------
// Finite-speed shrinkage

struct ShrinkScenario {
  int dimension = 2;
  double exterior_slope = INFINITY;  ///< u = min(nu, slope (|x| - r)) outside B_r; infinity is a jump to nu
  double horizon_exponent = 2.5;   ///< check up to t0 + r^exponent
  double cells_per_r = 40.0;
  double steps = 200.0;            ///< time steps per horizon
};

/// u = -h on B_r (h the elliptic pressure of the ball), then a ramp capped at nu; domain (0, 4r), zero flux.
inline LimitState shrink_initial(double r, const ModelParams& params, const ShrinkScenario& sc) {
  const auto n = static_cast<std::size_t>(std::lround(4.0 * sc.cells_per_r));
  const Grid g = Grid::radial(sc.dimension, 0.0, 4.0 * r, n);
  const auto h = elliptic_pressure_on(g, params.growth, [&](std::size_t i) { return g.center(i) < r; });
  Field u(g);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.center(i);
    if (x < r)
      u[i] = -h[i];
    else
      u[i] = std::isinf(sc.exterior_slope) ? params.nu : std::min(params.nu, sc.exterior_slope * (x - r));
  }
  return LimitState{u, params, limit_zero_flux()};
}

/**
 * @brief B_r negative at t0 keeps B_{r/2} negative up to t0 + r^{5/2}.
 *
 * Per r: the time B_{r/2} stayed negative, against the horizon. The bound
 * is only asserted for r below a constant c_0, so the passing radii must
 * form a lower set of the tested ones (a failure at some r with a pass at
 * a larger r is flagged). c_0 is reported as the largest tested r below
 * which every tested radius passed (0 if the smallest fails).
 */
inline LemmaCheckResult shrink_speed_check(const std::vector<double>& r_values, const ModelParams& params,
                                           const ShrinkScenario& sc = {}) {
  params.validate();
  std::vector<std::future<double>> jobs;
  for (double r : r_values)
    jobs.push_back(std::async(std::launch::async, [&, r] {
      const double horizon = std::pow(r, sc.horizon_exponent);
      return persistence_on_ball(shrink_initial(r, params, sc), 0.5 * r, horizon / sc.steps, horizon,
                                 [](double u) { return u < 0.0; });
    }));
  LemmaCheckResult res;
  res.lemma_id = "finite-shrink";
  std::vector<std::pair<double, bool>> outcome;
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    const double horizon = std::pow(r_values[i], sc.horizon_exponent);
    const double held = jobs[i].get();
    const bool ok = held >= horizon * (1.0 - 1e-12);
    res.details.push_back({"negative_until", r_values[i], held, horizon, ok});
    outcome.emplace_back(r_values[i], ok);
  }
  std::sort(outcome.begin(), outcome.end());
  double c0 = 0.0;
  bool lower_set = true, failed_below = false;
  for (const auto& [r, ok] : outcome) {
    if (!ok) failed_below = true;
    else if (failed_below) lower_set = false;
    if (!failed_below) c0 = r;
  }
  res.details.push_back({"passing_radii_lower_set", 0.0, lower_set ? 1.0 : 0.0, 1.0, lower_set});
  res.fitted.emplace_back("c_0", c0);
  res.settle();
  return res;
}

// ---------------------------------------------------------------------------
// Expansion bound

struct ExpansionScenario {
  int dimension = 2;
  double inner_value = 2.0;  ///< u = inner_value * r on B_r
  double cells_per_r = 40.0;
  double steps = 200.0;
};

/// u = inner_value r on B_r, linear to 0 at 3r, then -(|x| - 3r) capped at -p_M; domain (0, 6r).
inline LimitState expansion_initial(double r, const ModelParams& params, const ExpansionScenario& sc) {
  const auto n = static_cast<std::size_t>(std::lround(6.0 * sc.cells_per_r));
  const Grid g = Grid::radial(sc.dimension, 0.0, 6.0 * r, n);
  const double top = std::min(sc.inner_value * r, params.nu);
  const double p_M = params.growth.p_M();
  Field u = Field::sample(g, [&](double x) {
    if (x <= r) return top;
    if (x < 3.0 * r) return top * (3.0 * r - x) / (2.0 * r);
    return -std::min(p_M, x - 3.0 * r);
  });
  return LimitState{u, params, limit_zero_flux()};
}

/**
 * @brief u > 0 on B_3r and u > r on B_r keep B_{r/2} positive up to t0 + r^3.
 *
 * Trials whose initial data violate the hypothesis are reported as
 * hypothesis_not_met instead of failures.
 */
inline LemmaCheckResult expansion_bound_check(const std::vector<double>& r_values, const ModelParams& params,
                                              const ExpansionScenario& sc = {}) {
  params.validate();
  LemmaCheckResult res;
  res.lemma_id = "expansion-bound";
  bool hypothesis = true;
  std::vector<std::future<double>> jobs;
  for (double r : r_values) {
    const LimitState s0 = expansion_initial(r, params, sc);
    for (std::size_t i = 0; i < s0.u.size(); ++i) {
      const double x = s0.u.grid.center(i);
      if ((x < r && !(s0.u[i] > r)) || (x < 3.0 * r && !(s0.u[i] > 0.0))) hypothesis = false;
    }
    jobs.push_back(std::async(std::launch::async, [&, r, s0] {
      const double horizon = r * r * r;
      return persistence_on_ball(s0, 0.5 * r, horizon / sc.steps, horizon, [](double u) { return u > 0.0; });
    }));
  }
  double r0 = 0.0;
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    const double horizon = std::pow(r_values[i], 3.0);
    const double held = jobs[i].get();
    const bool ok = held >= horizon * (1.0 - 1e-12);
    res.details.push_back({"positive_until", r_values[i], held, horizon, ok});
    if (ok) r0 = std::max(r0, r_values[i]);
  }
  res.fitted.emplace_back("r_0", r0);
  if (!hypothesis) {
    res.status = LemmaStatus::hypothesis_not_met;
    return res;
  }
  res.settle();
  return res;
}

// ---------------------------------------------------------------------------
// Initial motion of the interface

struct InitialMotionScenario {
  int dimension = 2;
  double tumor_radius = 0.5;
  double exterior_density = 0.6;  ///< rho0 just outside the tumor, decaying linearly to 0 at the outer edge
  double length = 2.0;
  std::size_t cells = 1000;
  double dt = 1e-5;
};

/// Max distance from each free-boundary point of `now` to the nearest point of `then`.
inline double boundary_displacement(const FreeBoundary& then, const FreeBoundary& now) {
  if (now.positions.empty()) return 0.0;
  if (then.positions.empty()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double x : now.positions) {
    double d = std::numeric_limits<double>::infinity();
    for (double y : then.positions) d = std::min(d, std::abs(x - y));
    worst = std::max(worst, d);
  }
  return worst;
}

inline LimitState initial_motion_initial(const ModelParams& params, const InitialMotionScenario& sc) {
  const Grid g = Grid::radial(sc.dimension, 0.0, sc.length, sc.cells);
  const Field rho0 = Field::sample(g, [&](double x) {
    if (x < sc.tumor_radius) return 1.0;
    return sc.exterior_density * (sc.length - x) / (sc.length - sc.tumor_radius);
  });
  return project_initial_data(rho0, params, limit_far_field(params.nu));
}

/**
 * @brief Free-boundary displacement from t = 0 stays below t^{1/3}.
 *
 * Reports t_0 (the largest sample passing with all smaller samples) and
 * the log-log slope of displacement against t, which must be >= 1/3.
 */
inline LemmaCheckResult initial_motion_check(const ModelParams& params, std::vector<double> t_samples,
                                             const InitialMotionScenario& sc = {}) {
  params.validate();
  std::sort(t_samples.begin(), t_samples.end());
  if (t_samples.empty() || !(t_samples.front() > 0.0)) throw InvalidParameter("initial motion needs positive sample times");
  const LimitState s0 = initial_motion_initial(params, sc);
  StepControl c;
  c.dt = sc.dt;
  c.t_end = t_samples.back();
  c.snapshot_times = t_samples;
  const auto run = limit_run(s0, c);
  const FreeBoundary start = extract_free_boundary(s0.u);

  LemmaCheckResult res;
  res.lemma_id = "initial-motion";
  std::vector<double> ts, ds;
  double t0 = 0.0;
  bool prefix = true;
  for (std::size_t k = 0; k < t_samples.size(); ++k) {
    const double t = t_samples[k];
    const double d = boundary_displacement(start, run.boundaries[k]);
    const double bound = std::cbrt(t);
    const bool ok = d < bound;
    res.details.push_back({"displacement", t, d, bound, ok});
    prefix = prefix && ok;
    if (prefix) t0 = t;
    if (d > 0.0 && std::isfinite(d)) {
      ts.push_back(t);
      ds.push_back(d);
    }
  }
  if (ts.size() >= 2) {
    const double slope = log_log_slope(ts, ds);
    res.details.push_back({"loglog_slope", 0.0, slope, 1.0 / 3.0, slope >= 1.0 / 3.0});
    res.fitted.emplace_back("slope", slope);
  }
  res.fitted.emplace_back("t_0", t0);
  res.settle();
  return res;
}

}  // namespace spl
