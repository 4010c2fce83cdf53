#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <vector>

#include "spl/core/errors.hpp"
#include "spl/core/grid.hpp"
#include "spl/core/model.hpp"
#include "spl/diagnostics/report.hpp"
#include "spl/diagnostics/rng.hpp"
#include "spl/limit/solver.hpp"
#include "spl/pme/solver.hpp"

namespace spl {

struct ComparisonScenario {
  double delta = 1e-3;  ///< gap u_a <= u_b - delta of the limit pairs
  double slack = 1e-9;
  int dimension = 2;
  double length = 2.0;
  std::size_t cells = 50;
  std::size_t pme_steps = 1000;
  double limit_dt = 1e-3;
  std::size_t limit_steps = 100;
  double nucleation_low = 0.2;  ///< constant data of the pair that nucleates first
  double nucleation_high = 0.25;
};

namespace detail {

// Sum of three Gaussian bumps with random centers, widths and amplitudes, drawn from counters 0..8.
inline std::vector<double> random_bumps(const CounterRng& rng, const Grid& g, double amp_lo, double amp_hi) {
  std::vector<double> v(g.size(), 0.0);
  for (std::uint64_t b = 0; b < 3; ++b) {
    const double c = rng.uniform(3 * b, g.x_min(), g.x_max());
    const double w = rng.uniform(3 * b + 1, 0.1, 0.5) * (g.x_max() - g.x_min());
    const double a = rng.uniform(3 * b + 2, amp_lo, amp_hi);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double z = (g.center(i) - c) / w;
      v[i] += a * std::exp(-z * z);
    }
  }
  return v;
}

inline double worst_excess(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = -INFINITY;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, a[i] - b[i]);
  return worst;
}

// Ordered densities rho_a <= rho_b in [0, 0.98], zero flux, explicit steps with a shared stable dt.
inline double pme_pair_excess(std::uint64_t seed, std::size_t trial, const ModelParams& params,
                              const ComparisonScenario& sc) {
  const Grid g = Grid::radial(sc.dimension, 0.0, sc.length, sc.cells);
  const CounterRng upper(seed, 2 * trial), lower(seed, 2 * trial + 1);
  const auto top = random_bumps(upper, g, 0.2, 0.7);
  const auto gap = random_bumps(lower, g, 0.0, 0.3);
  PmeState a{Field(g), params, pme_zero_flux()}, b{Field(g), params, pme_zero_flux()};
  for (std::size_t i = 0; i < g.size(); ++i) {
    b.rho[i] = std::min(0.98, top[i]);
    a.rho[i] = std::max(0.0, b.rho[i] - gap[i]);
  }
  PmeStepper stepper(g, a.bc);
  double worst = worst_excess(a.rho.values, b.rho.values);
  for (std::size_t k = 0; k < sc.pme_steps; ++k) {
    const double dt = std::min(stepper.stable_dt(a), stepper.stable_dt(b));
    a = stepper.step(a, dt, Scheme::explicit_euler);
    b = stepper.step(b, dt, Scheme::explicit_euler);
    worst = std::max(worst, worst_excess(a.rho.values, b.rho.values));
  }
  return worst;
}

// Ordered limit data u_a <= u_b - delta with u_b in [-0.8, nu], zero flux.
inline double limit_pair_excess(std::uint64_t seed, std::size_t trial, const ModelParams& params,
                                const ComparisonScenario& sc) {
  const Grid g = Grid::radial(sc.dimension, 0.0, sc.length, sc.cells);
  const CounterRng upper(seed, 1'000'000 + 2 * trial), lower(seed, 1'000'001 + 2 * trial);
  const auto top = random_bumps(upper, g, -0.6, 0.6);
  const auto gap = random_bumps(lower, g, 0.0, 0.3);
  LimitState a{Field(g), params, limit_zero_flux()}, b{Field(g), params, limit_zero_flux()};
  for (std::size_t i = 0; i < g.size(); ++i) {
    b.u[i] = std::clamp(top[i] - 0.3, -0.8, params.nu);
    a.u[i] = b.u[i] - sc.delta - gap[i];
  }
  const LimitStepper stepper(g, a.bc);
  double worst = worst_excess(a.u.values, b.u.values);
  for (std::size_t k = 0; k < sc.limit_steps; ++k) {
    a = stepper.step(a, sc.limit_dt);
    b = stepper.step(b, sc.limit_dt);
    worst = std::max(worst, worst_excess(a.u.values, b.u.values));
  }
  return worst;
}

}  // namespace detail

/**
 * @brief Ordered pairs of initial data stay ordered under both solvers.
 *
 * Each trial draws its pair from its own generator stream, so results do
 * not depend on scheduling. Density pairs are compared for the m-dependent
 * solver, u pairs for the limit solver. A final pair of constant positive
 * data, where only the lower one has nucleated for a while, checks that
 * b(u) stays ordered through the jump.
 */
inline LemmaCheckResult comparison_check(std::size_t n_trials, std::uint64_t seed, const ModelParams& params,
                                         const ComparisonScenario& sc = {}) {
  params.validate();
  if (n_trials == 0) throw InvalidParameter("comparison check needs >= 1 trial");
  if (!(sc.delta >= 0.0) || !(sc.slack >= 0.0)) throw InvalidParameter("delta and slack must be >= 0");
  if (!(sc.nucleation_low > 0.0 && sc.nucleation_low < sc.nucleation_high && sc.nucleation_high < params.nu))
    throw InvalidParameter("nucleation pair needs 0 < low < high < nu");

  std::vector<std::future<double>> pme, limit;
  for (std::size_t t = 0; t < n_trials; ++t) {
    pme.push_back(std::async(std::launch::async, [&, t] { return detail::pme_pair_excess(seed, t, params, sc); }));
    limit.push_back(std::async(std::launch::async, [&, t] { return detail::limit_pair_excess(seed, t, params, sc); }));
  }

  // Nucleation pair: runs until the upper datum has also nucleated.
  const double g0 = params.growth.g0();
  const double t_high = std::log(params.nu / (params.nu - sc.nucleation_high)) / g0;
  const Grid g = Grid::radial(sc.dimension, 0.0, sc.length, 10);
  LimitState a{Field(g), params, limit_zero_flux()}, b{Field(g), params, limit_zero_flux()};
  std::fill(a.u.values.begin(), a.u.values.end(), sc.nucleation_low);
  std::fill(b.u.values.begin(), b.u.values.end(), sc.nucleation_high);
  const LimitStepper stepper(g, a.bc);
  double worst_b = 0.0, worst_u = 0.0;
  bool split = false;
  for (double t = 0.0; t < 1.2 * t_high; t += sc.limit_dt) {
    a = stepper.step(a, sc.limit_dt);
    b = stepper.step(b, sc.limit_dt);
    worst_u = std::max(worst_u, detail::worst_excess(a.u.values, b.u.values));
    for (std::size_t i = 0; i < g.size(); ++i) {
      worst_b = std::max(worst_b, b_graph(a.u[i]) - b_graph(b.u[i]));
      split = split || (a.u[i] < 0.0 && b.u[i] > 0.0);
    }
  }

  LemmaCheckResult res;
  res.lemma_id = "comparison";
  for (std::size_t t = 0; t < n_trials; ++t) {
    const double e = pme[t].get();
    res.details.push_back({"pme_density_excess", static_cast<double>(t), e, sc.slack, e <= sc.slack});
  }
  for (std::size_t t = 0; t < n_trials; ++t) {
    const double e = limit[t].get();
    res.details.push_back({"limit_u_excess", static_cast<double>(t), e, sc.slack, e <= sc.slack});
  }
  res.details.push_back({"nucleation_u_excess", sc.nucleation_low, worst_u, sc.slack, worst_u <= sc.slack});
  res.details.push_back({"nucleation_b_excess", sc.nucleation_low, worst_b, sc.slack, worst_b <= sc.slack});
  res.details.push_back({"nucleation_lower_first", sc.nucleation_low, split ? 1.0 : 0.0, 1.0, split});
  res.settle();
  return res;
}

}  // namespace spl
